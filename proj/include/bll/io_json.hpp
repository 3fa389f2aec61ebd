#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bll/bellcheck.hpp"
#include "bll/dilation.hpp"
#include "bll/states.hpp"
#include "bll/tensor.hpp"
#include "bll/tpcert.hpp"

namespace bll::io {

// ordered_json keeps key order fixed so identical inputs yield byte-identical
// output.
using Json = nlohmann::ordered_json;

inline Json complex_pairs(const Vector& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

// Row-major entry list, [re, im] pairs.
inline Json complex_pairs(const Matrix& m) {
  Json out = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return out;
}

inline Vector vector_from_pairs(const Json& j) {
  Vector v(static_cast<long>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<long>(i)) = Complex(j[i].at(0).get<double>(), j[i].at(1).get<double>());
  }
  return v;
}

inline Matrix matrix_from_pairs(const Json& j, long rows, long cols) {
  if (static_cast<long>(j.size()) != rows * cols) {
    throw std::invalid_argument("matrix entries: wrong element count");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c, ++k) {
      m(r, c) = Complex(j[k].at(0).get<double>(), j[k].at(1).get<double>());
    }
  }
  return m;
}

inline Json operator_to_json(const OperatorOnProduct& op) {
  Json j;
  j["dims"] = op.space.dims;
  j["entries"] = complex_pairs(op.mat);
  return j;
}

inline OperatorOnProduct operator_from_json(const Json& j) {
  FactorSpace space{j.at("dims").get<std::vector<int>>()};
  const long n = space.total_dim();
  return {std::move(space), matrix_from_pairs(j.at("entries"), n, n)};
}

// State file: {"d", "n_sites", "coeffs": [[re, im], ...]} with the site-1
// index slowest. The constructor validates normalization.
inline Json state_to_json(const PureStateCoeffs& psi) {
  Json j;
  j["d"] = psi.d;
  j["n_sites"] = psi.n_sites;
  j["coeffs"] = complex_pairs(psi.coeffs);
  return j;
}

inline PureStateCoeffs state_from_json(const Json& j) {
  return {j.at("d").get<int>(), j.at("n_sites").get<int>(),
          vector_from_pairs(j.at("coeffs"))};
}

inline Json source_to_json(const SourceOperator& src) {
  Json j;
  j["d"] = src.d;
  j["profile"] = src.profile.settings;
  j["op"] = operator_to_json(src.op);
  j["target"] = operator_to_json(src.target);
  return j;
}

inline SourceOperator source_from_json(const Json& j) {
  SourceOperator src;
  src.d = j.at("d").get<int>();
  src.profile = SettingProfile{j.at("profile").get<std::vector<int>>()};
  src.op = operator_from_json(j.at("op"));
  src.target = operator_from_json(j.at("target"));
  if (!(src.op.space == src.profile.dilation_space(src.d))) {
    throw std::invalid_argument("source operator: dims do not match the profile");
  }
  return src;
}

inline Json certificate_to_json(const TpCertificate& cert) {
  Json j;
  j["verdict"] = cert.verdict == TpVerdict::kViolation ? "violation" : "no-violation-found";
  j["min_value"] = cert.min_value;
  Json witness = Json::array();
  for (const Vector& v : cert.witness.vectors) witness.push_back(complex_pairs(v));
  j["witness"] = witness;
  j["restarts"] = cert.restarts;
  j["iterations"] = cert.iterations;
  j["seed"] = cert.seed;
  j["violation_tol"] = cert.violation_tol;
  return j;
}

// Scenario/functional file: settings, per-site outcome values, and one
// coefficient table per joint setting in flattened order (site-1 slowest).
inline Json functional_to_json(const bell::BellFunctional& phi) {
  Json j;
  j["settings"] = phi.scenario.settings;
  j["outcomes"] = phi.scenario.outcomes;
  j["tables"] = phi.tables;
  return j;
}

inline bell::BellFunctional functional_from_json(const Json& j) {
  bell::Scenario sc(j.at("settings").get<std::vector<int>>(),
                    j.at("outcomes").get<std::vector<std::vector<double>>>());
  return {std::move(sc), j.at("tables").get<std::vector<std::vector<double>>>()};
}

// POVM file: {"sites": [{"settings": [{"effects": [{"dim", "entries"}...]}...]}...]}
inline Json assemblage_to_json(const bell::MeasurementAssemblage& povms) {
  Json sites = Json::array();
  for (const auto& site : povms.effects) {
    Json settings = Json::array();
    for (const auto& family : site) {
      Json effects = Json::array();
      for (const Matrix& e : family) {
        Json eff;
        eff["dim"] = e.rows();
        eff["entries"] = complex_pairs(e);
        effects.push_back(std::move(eff));
      }
      settings.push_back(Json{{"effects", std::move(effects)}});
    }
    sites.push_back(Json{{"settings", std::move(settings)}});
  }
  return Json{{"sites", std::move(sites)}};
}

inline bell::MeasurementAssemblage assemblage_from_json(const Json& j) {
  bell::MeasurementAssemblage povms;
  for (const Json& site : j.at("sites")) {
    std::vector<std::vector<Matrix>> families;
    for (const Json& setting : site.at("settings")) {
      std::vector<Matrix> effects;
      for (const Json& eff : setting.at("effects")) {
        const long dim = eff.at("dim").get<long>();
        effects.push_back(matrix_from_pairs(eff.at("entries"), dim, dim));
      }
      families.push_back(std::move(effects));
    }
    povms.effects.push_back(std::move(families));
  }
  return povms;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  Json j;
  in >> j;
  return j;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace bll::io
