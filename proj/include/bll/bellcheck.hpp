#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bll/parallel.hpp"
#include "bll/tensor.hpp"

namespace bll::bell {

inline constexpr long kMaxStrategies = 10'000'000;

// Finite-outcome correlation scenario: S_n settings and a finite real-valued
// outcome set per site.
struct Scenario {
  int n_sites = 0;
  std::vector<int> settings;                  // S_n >= 1
  std::vector<std::vector<double>> outcomes;  // per-site outcome values, >= 2 each

  Scenario() = default;
  Scenario(std::vector<int> s, std::vector<std::vector<double>> o)
      : n_sites(static_cast<int>(s.size())), settings(std::move(s)), outcomes(std::move(o)) {
    if (n_sites < 2) throw std::invalid_argument("Scenario: need at least two sites");
    if (outcomes.size() != settings.size()) {
      throw std::invalid_argument("Scenario: one outcome set per site required");
    }
    for (int v : settings) {
      if (v < 1) throw std::invalid_argument("Scenario: settings must be >= 1");
    }
    for (const auto& o_n : outcomes) {
      if (o_n.size() < 2) throw std::invalid_argument("Scenario: outcome sets need >= 2 labels");
    }
  }

  long joint_setting_count() const {
    long t = 1;
    for (int s : settings) t *= s;
    return t;
  }

  long joint_outcome_count() const {
    long t = 1;
    for (const auto& o : outcomes) t *= static_cast<long>(o.size());
    return t;
  }

  // site-1 slowest, matching the library-wide index convention
  std::vector<long> setting_strides() const {
    std::vector<long> st(settings.size(), 1);
    for (int f = n_sites - 2; f >= 0; --f) st[f] = st[f + 1] * settings[f + 1];
    return st;
  }

  std::vector<long> outcome_strides() const {
    std::vector<long> st(outcomes.size(), 1);
    for (int f = n_sites - 2; f >= 0; --f) {
      st[f] = st[f + 1] * static_cast<long>(outcomes[f + 1].size());
    }
    return st;
  }
};

// Linear form over scenario averages: one real table per joint setting,
// indexed over joint outcomes.
struct BellFunctional {
  Scenario scenario;
  std::vector<std::vector<double>> tables;  // [joint setting][joint outcome]

  BellFunctional() = default;
  BellFunctional(Scenario sc, std::vector<std::vector<double>> t)
      : scenario(std::move(sc)), tables(std::move(t)) {
    if (static_cast<long>(tables.size()) != scenario.joint_setting_count()) {
      throw std::invalid_argument("BellFunctional: one table per joint setting required");
    }
    const long oc = scenario.joint_outcome_count();
    for (const auto& table : tables) {
      if (static_cast<long>(table.size()) != oc) {
        throw std::invalid_argument("BellFunctional: table shape mismatch");
      }
    }
  }
};

// POV measures: positive effects per (site, setting), one per outcome label,
// summing to the identity.
struct MeasurementAssemblage {
  std::vector<std::vector<std::vector<Matrix>>> effects;  // [site][setting][outcome]
};

// One chosen outcome label per (site, setting) pair; the extreme points of
// the local hidden variable representation.
struct DeterministicStrategy {
  std::vector<std::vector<int>> choice;  // [site][setting] -> outcome index
};

struct LhvConstants {
  double sup = 0.0;
  double inf = 0.0;
  DeterministicStrategy arg_sup;
  DeterministicStrategy arg_inf;
};

namespace detail {

inline DeterministicStrategy decode_strategy(const Scenario& sc, long code) {
  DeterministicStrategy st;
  st.choice.resize(sc.settings.size());
  for (int site = sc.n_sites - 1; site >= 0; --site) {
    const long radix = static_cast<long>(sc.outcomes[site].size());
    st.choice[site].resize(sc.settings[site]);
    for (int s = sc.settings[site] - 1; s >= 0; --s) {
      st.choice[site][s] = static_cast<int>(code % radix);
      code /= radix;
    }
  }
  return st;
}

inline double strategy_value(const BellFunctional& phi, const DeterministicStrategy& st,
                             const std::vector<std::vector<int>>& joint_settings,
                             const std::vector<long>& outcome_strides) {
  double value = 0.0;
  for (std::size_t js = 0; js < joint_settings.size(); ++js) {
    long o = 0;
    for (int site = 0; site < phi.scenario.n_sites; ++site) {
      o += st.choice[site][joint_settings[js][site]] * outcome_strides[site];
    }
    value += phi.tables[js][o];
  }
  return value;
}

inline std::vector<std::vector<int>> enumerate_joint_settings(const Scenario& sc) {
  std::vector<std::vector<int>> out(sc.joint_setting_count(),
                                    std::vector<int>(sc.n_sites));
  for (long js = 0; js < static_cast<long>(out.size()); ++js) {
    long v = js;
    for (int site = sc.n_sites - 1; site >= 0; --site) {
      out[js][site] = static_cast<int>(v % sc.settings[site]);
      v /= sc.settings[site];
    }
  }
  return out;
}

}  // namespace detail

// Exact max/min of the functional over all deterministic strategies, with
// attaining strategies (lowest strategy index on ties).
inline LhvConstants lhv_constants(const BellFunctional& phi) {
  const Scenario& sc = phi.scenario;
  double log_count = 0.0;
  long count = 1;
  for (int site = 0; site < sc.n_sites; ++site) {
    log_count += sc.settings[site] * std::log(static_cast<double>(sc.outcomes[site].size()));
  }
  if (log_count > std::log(static_cast<double>(kMaxStrategies))) {
    throw std::domain_error("lhv_constants: strategy space too large to enumerate");
  }
  for (int site = 0; site < sc.n_sites; ++site) {
    for (int s = 0; s < sc.settings[site]; ++s) {
      count *= static_cast<long>(sc.outcomes[site].size());
    }
  }

  const auto joint_settings = detail::enumerate_joint_settings(sc);
  const auto ostrides = sc.outcome_strides();

  const std::size_t chunks = std::min<std::size_t>(worker_count() * 4, static_cast<std::size_t>(count));
  struct Extreme {
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    long arg_sup = 0;
    long arg_inf = 0;
  };
  std::vector<Extreme> partials(chunks);
  const long per_chunk = (count + static_cast<long>(chunks) - 1) / static_cast<long>(chunks);
  parallel_for(chunks, [&](std::size_t chunk) {
    const long begin = static_cast<long>(chunk) * per_chunk;
    const long end = std::min(count, begin + per_chunk);
    Extreme ex;
    for (long code = begin; code < end; ++code) {
      const DeterministicStrategy st = detail::decode_strategy(sc, code);
      const double value = detail::strategy_value(phi, st, joint_settings, ostrides);
      if (value > ex.sup) {
        ex.sup = value;
        ex.arg_sup = code;
      }
      if (value < ex.inf) {
        ex.inf = value;
        ex.arg_inf = code;
      }
    }
    partials[chunk] = ex;
  });

  Extreme best;
  for (const Extreme& ex : partials) {
    if (ex.sup > best.sup || (ex.sup == best.sup && ex.arg_sup < best.arg_sup)) {
      best.sup = ex.sup;
      best.arg_sup = ex.arg_sup;
    }
    if (ex.inf < best.inf || (ex.inf == best.inf && ex.arg_inf < best.arg_inf)) {
      best.inf = ex.inf;
      best.arg_inf = ex.arg_inf;
    }
  }
  return {best.sup, best.inf, detail::decode_strategy(sc, best.arg_sup),
          detail::decode_strategy(sc, best.arg_inf)};
}

inline double lhv_abs_bound(const BellFunctional& phi) {
  const LhvConstants c = lhv_constants(phi);
  return std::max(std::abs(c.sup), std::abs(c.inf));
}

namespace detail {

inline void validate_assemblage(const Scenario& sc, const OperatorOnProduct& state,
                                const MeasurementAssemblage& povms) {
  if (state.space.factor_count() != sc.n_sites) {
    throw std::invalid_argument("quantum_average: state factor count must equal n_sites");
  }
  if (static_cast<int>(povms.effects.size()) != sc.n_sites) {
    throw std::invalid_argument("quantum_average: one effect family per site required");
  }
  for (int site = 0; site < sc.n_sites; ++site) {
    if (static_cast<int>(povms.effects[site].size()) != sc.settings[site]) {
      throw std::invalid_argument("quantum_average: one POV measure per setting required");
    }
    const int dim = state.space.dims[site];
    for (int s = 0; s < sc.settings[site]; ++s) {
      const auto& family = povms.effects[site][s];
      if (family.size() != sc.outcomes[site].size()) {
        throw std::invalid_argument("quantum_average: one effect per outcome required");
      }
      Matrix sum = Matrix::Zero(dim, dim);
      for (const Matrix& e : family) {
        if (e.rows() != dim || e.cols() != dim) {
          throw std::invalid_argument("quantum_average: effect dimension mismatch");
        }
        OperatorOnProduct eff{FactorSpace({dim}), e};
        if (!eff.is_hermitian(1e-10) || min_eigenvalue(eff).value < -1e-10) {
          throw std::invalid_argument("quantum_average: effects must be positive semidefinite");
        }
        sum += e;
      }
      if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("quantum_average: effects must sum to the identity");
      }
    }
  }
}

}  // namespace detail

// Born-rule value of the functional:
// Σ_{joint settings} Σ_{joint outcomes} f(λ) tr[rho (M_1 ⊗ ... ⊗ M_N)].
inline double quantum_average(const BellFunctional& phi, const OperatorOnProduct& state,
                              const MeasurementAssemblage& povms) {
  const Scenario& sc = phi.scenario;
  detail::validate_assemblage(sc, state, povms);

  const auto joint_settings = detail::enumerate_joint_settings(sc);
  const long oc = sc.joint_outcome_count();
  const auto ostrides = sc.outcome_strides();
  double total = 0.0;
  std::vector<const Matrix*> chosen(static_cast<std::size_t>(sc.n_sites));
  for (std::size_t js = 0; js < joint_settings.size(); ++js) {
    for (long o = 0; o < oc; ++o) {
      const double f = phi.tables[js][o];
      if (f == 0.0) continue;
      long v = o;
      for (int site = 0; site < sc.n_sites; ++site) {
        const int label = static_cast<int>(v / ostrides[site]);
        v %= ostrides[site];
        chosen[site] = &povms.effects[site][joint_settings[js][site]][label];
      }
      const Complex p = trace_kron_product(state, chosen);
      total += f * p.real();
    }
  }
  return total;
}

// |quantum average| / LHV bound for one fixed functional and measurement
// collection; > 1 witnesses Bell nonlocality, <= 1 is inconclusive.
inline double violation_ratio(const BellFunctional& phi, const OperatorOnProduct& state,
                              const MeasurementAssemblage& povms) {
  const double bound = lhv_abs_bound(phi);
  if (bound <= 0.0) throw std::domain_error("violation_ratio: zero LHV bound");
  return std::abs(quantum_average(phi, state, povms)) / bound;
}

// Full-correlator functional f_s(λ) = c_s · λ_1 ... λ_N with ±1 outcomes.
inline BellFunctional full_correlator_functional(std::vector<int> settings,
                                                 const std::vector<double>& coefficients) {
  const int n = static_cast<int>(settings.size());
  Scenario sc(std::move(settings),
              std::vector<std::vector<double>>(n, std::vector<double>{1.0, -1.0}));
  if (static_cast<long>(coefficients.size()) != sc.joint_setting_count()) {
    throw std::invalid_argument("full_correlator_functional: one coefficient per joint setting");
  }
  const long oc = sc.joint_outcome_count();
  const auto ostrides = sc.outcome_strides();
  std::vector<std::vector<double>> tables(coefficients.size(), std::vector<double>(oc));
  for (std::size_t js = 0; js < coefficients.size(); ++js) {
    for (long o = 0; o < oc; ++o) {
      double prod = 1.0;
      long v = o;
      for (int site = 0; site < sc.n_sites; ++site) {
        const int label = static_cast<int>(v / ostrides[site]);
        v %= ostrides[site];
        prod *= sc.outcomes[site][label];
      }
      tables[js][o] = coefficients[js] * prod;
    }
  }
  return {std::move(sc), std::move(tables)};
}

// A1B1 + A1B2 + A2B1 - A2B2 with ±1 outcomes; LHV bound 2.
inline BellFunctional chsh_functional() {
  return full_correlator_functional({2, 2}, {1.0, 1.0, 1.0, -1.0});
}

// Three-party combination A1B1C1 - A1B2C2 - A2B1C2 - A2B2C1 with ±1
// outcomes; LHV bound 2.
inline BellFunctional mermin3_functional() {
  return full_correlator_functional({2, 2, 2},
                                    {1.0, 0.0, 0.0, -1.0, 0.0, -1.0, -1.0, 0.0});
}

// Setting 1 = σ_x eigenbasis, setting 2 = σ_y eigenbasis, outcome order
// (+1, -1); the standard qubit pair for the built-in functionals.
inline MeasurementAssemblage pauli_xy_assemblage(int n_sites) {
  if (n_sites < 2) throw std::invalid_argument("pauli_xy_assemblage: need n_sites >= 2");
  const Complex i(0.0, 1.0);
  Vector xp(2), xm(2), yp(2), ym(2);
  xp << 1.0, 1.0;
  xm << 1.0, -1.0;
  yp << 1.0, i;
  ym << 1.0, -i;
  const auto proj = [](Vector v) {
    v /= v.norm();
    return Matrix(v * v.adjoint());
  };
  std::vector<std::vector<Matrix>> site_effects{
      {proj(xp), proj(xm)},
      {proj(yp), proj(ym)},
  };
  MeasurementAssemblage povms;
  povms.effects.assign(static_cast<std::size_t>(n_sites), site_effects);
  return povms;
}

}  // namespace bll::bell
