#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bll/dilation.hpp"
#include "bll/parallel.hpp"
#include "bll/rational.hpp"
#include "bll/rng.hpp"
#include "bll/states.hpp"
#include "bll/tensor.hpp"

namespace bll {

inline constexpr double kViolationTol = 1e-9;

// One unit vector per tensor factor; the rank-1 extreme points of the
// positive product operators tensor positivity quantifies over.
struct ProductState {
  std::vector<Vector> vectors;
};

enum class TpVerdict { kNoViolationFound, kViolation };

// Outcome of a multi-restart product-state minimization. A violation verdict
// is a proof that tensor positivity fails (the witness exhibits a negative
// product expectation); no-violation-found is a heuristic verdict only.
struct TpCertificate {
  TpVerdict verdict = TpVerdict::kNoViolationFound;
  double min_value = 0.0;
  ProductState witness;
  int restarts = 0;
  std::vector<int> iterations;
  std::uint64_t seed = 0;
  double violation_tol = kViolationTol;
};

namespace detail {

inline void require_hermitian(const OperatorOnProduct& w, const char* who) {
  if (!w.is_hermitian()) {
    throw std::invalid_argument(std::string(who) + ": operator is not hermitian");
  }
}

inline void require_product_state(const OperatorOnProduct& w, const ProductState& p) {
  if (static_cast<int>(p.vectors.size()) != w.space.factor_count()) {
    throw std::invalid_argument("product state: factor count mismatch");
  }
  for (int f = 0; f < w.space.factor_count(); ++f) {
    if (p.vectors[f].size() != w.space.dims[f]) {
      throw std::invalid_argument("product state: vector dimension mismatch");
    }
    if (std::abs(p.vectors[f].norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("product state: vectors must have unit norm");
    }
  }
}

}  // namespace detail

// <⊗psi_f| w |⊗psi_f>, guaranteed real for hermitian w.
inline double product_expectation(const OperatorOnProduct& w, const ProductState& p) {
  detail::require_hermitian(w, "product_expectation");
  detail::require_product_state(w, p);
  const Vector v = kron_vectors(p.vectors);
  const Complex val = v.adjoint() * (w.mat * v);
  if (std::abs(val.imag()) > 1e-10 * (1.0 + std::abs(val.real()))) {
    throw std::logic_error("product_expectation: nonreal expectation of a hermitian operator");
  }
  return val.real();
}

struct SeesawResult {
  double value = 0.0;
  ProductState state;
  int iterations = 0;
};

// Alternating minimization over one factor at a time: contract w with all
// other factors' vectors into an effective hermitian matrix and replace the
// factor's vector by its minimal eigenvector. The value sequence is
// non-increasing; stops when a full sweep improves by less than tol.
inline SeesawResult seesaw_minimize(const OperatorOnProduct& w, ProductState start,
                                    int max_iter, double tol) {
  detail::require_hermitian(w, "seesaw_minimize");
  detail::require_product_state(w, start);
  const int m = w.space.factor_count();
  const long n = w.dim();
  const auto strides = w.space.strides();
  std::vector<std::vector<int>> digit(m, std::vector<int>(n));
  for (int f = 0; f < m; ++f) {
    for (long i = 0; i < n; ++i) {
      digit[f][i] = static_cast<int>((i / strides[f]) % w.space.dims[f]);
    }
  }
  const double scale = w.max_abs();

  double value = product_expectation(w, start);
  ProductState current = std::move(start);
  std::vector<Complex> partial(n);
  int sweeps = 0;
  for (; sweeps < max_iter; ++sweeps) {
    const double sweep_start = value;
    for (int f = 0; f < m; ++f) {
      const int df = w.space.dims[f];
      // partial[i] = Π_{g != f} psi_g[digit_g(i)]
      for (long i = 0; i < n; ++i) {
        Complex prod = 1.0;
        for (int g = 0; g < m; ++g) {
          if (g != f) prod *= current.vectors[g](digit[g][i]);
        }
        partial[i] = prod;
      }
      Matrix eff = Matrix::Zero(df, df);
      for (long r = 0; r < n; ++r) {
        for (long c = 0; c < n; ++c) {
          const Complex v = w.mat(r, c);
          if (v == 0.0) continue;
          eff(digit[f][r], digit[f][c]) += std::conj(partial[r]) * v * partial[c];
        }
      }
      eff = 0.5 * (eff + eff.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> solver(eff);
      if (solver.info() != Eigen::Success) {
        throw std::runtime_error("seesaw_minimize: eigensolver failed");
      }
      const double updated = solver.eigenvalues()(0);
      if (updated > value + 1e-9 * (1.0 + scale)) {
        throw std::logic_error("seesaw_minimize: non-monotone update");
      }
      value = updated;
      current.vectors[f] = solver.eigenvectors().col(0);
    }
    if (sweep_start - value < tol) {
      ++sweeps;
      break;
    }
  }
  return {value, std::move(current), sweeps};
}

struct SeesawOptions {
  int restarts = 64;
  int max_iter = 200;
  double improve_tol = 1e-12;
  double violation_tol = kViolationTol;
};

// Multi-restart see-saw from uniformly random product starts. Deterministic
// given the master seed: restart i derives its own stream, and the reduction
// takes the minimum value with ties broken by lowest restart index.
inline TpCertificate certify_tensor_positivity(const OperatorOnProduct& w,
                                               const SeesawOptions& opts,
                                               std::uint64_t seed) {
  detail::require_hermitian(w, "certify_tensor_positivity");
  if (opts.restarts < 1) {
    throw std::invalid_argument("certify_tensor_positivity: restarts must be >= 1");
  }
  std::vector<SeesawResult> results(static_cast<std::size_t>(opts.restarts));
  parallel_for(static_cast<std::size_t>(opts.restarts), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    ProductState start;
    start.vectors.reserve(w.space.dims.size());
    for (int dim : w.space.dims) start.vectors.push_back(random_unit_vector(dim, rng));
    results[i] = seesaw_minimize(w, std::move(start), opts.max_iter, opts.improve_tol);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].value < results[best].value) best = i;
  }

  TpCertificate cert;
  cert.min_value = results[best].value;
  cert.witness = results[best].state;
  cert.restarts = opts.restarts;
  cert.seed = seed;
  cert.violation_tol = opts.violation_tol;
  cert.iterations.reserve(results.size());
  for (const SeesawResult& r : results) cert.iterations.push_back(r.iterations);
  cert.verdict = cert.min_value < -opts.violation_tol ? TpVerdict::kViolation
                                                      : TpVerdict::kNoViolationFound;
  const double check = product_expectation(w, cert.witness);
  if (std::abs(check - cert.min_value) > 1e-10 * (1.0 + std::abs(cert.min_value))) {
    throw std::logic_error("certify_tensor_positivity: witness does not reproduce the minimum");
  }
  return cert;
}

// (|tr W|, ||W||_1): the two computable sides sandwiching the covering norm.
// They coincide exactly when W is positive with unit trace.
inline std::pair<double, double> covering_norm_bounds(const OperatorOnProduct& w) {
  detail::require_hermitian(w, "covering_norm_bounds");
  return {std::abs(w.trace()), trace_norm(w)};
}

// V(psi ⊗ phi) = phi ⊗ psi on C^d ⊗ C^d. Tensor positive (its product
// expectations are |<psi|phi>|²) but not positive; trace d, trace norm d².
inline OperatorOnProduct flip_operator(int d) {
  if (d < 2) throw std::invalid_argument("flip_operator: need d >= 2");
  const long n = static_cast<long>(d) * d;
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(static_cast<long>(i) * d + j, static_cast<long>(j) * d + i) = 1.0;
    }
  }
  return {FactorSpace({d, d}), std::move(m)};
}

enum class ThresholdKind { kGhz, kPure };

// Exact tensor-positivity margin of the noisy mixture source operator:
//   ghz:  (1 - beta) C_{d,N}  - beta / d
//   pure: (1 - beta) C~_{d,N} - gamma_max * beta
// Nonnegative iff the mixture is certified tensor positive; vanishes exactly
// at the locality threshold.
inline Rational threshold_coefficient(ThresholdKind kind, int d, int n_sites,
                                      const Rational& beta,
                                      const std::optional<Rational>& gamma = std::nullopt) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("threshold_coefficient: need d >= 2 and N >= 2");
  }
  const Rational one(1);
  if (kind == ThresholdKind::kGhz) {
    return (one - beta) * noise_constant_ghz(d, n_sites) - beta / d;
  }
  if (!gamma.has_value()) {
    throw std::invalid_argument("threshold_coefficient: pure kind requires gamma_max");
  }
  return (one - beta) * noise_constant_general(d, n_sites) - *gamma * beta;
}

struct DeltaChainReport {
  int trials = 0;
  std::uint64_t seed = 0;
  double min_slack = 0.0;  // min over trials of (Delta - coefficient * positive sum)
  double min_delta = 0.0;  // min over trials of Delta itself
  double coefficient = 0.0;
};

// Numerical check of the off-diagonal lower-bound chain behind the
// closed-form thresholds. For random positive X_1 on C^d and X_n on the site
// blocks, the cross-term expression Delta of the mixture expectation must
// dominate threshold_coefficient times the all-positive W~ sum.
inline DeltaChainReport appendix_delta_check(ThresholdKind kind, int d, int n_sites,
                                             const SettingProfile& profile, double beta,
                                             int trials, std::uint64_t seed,
                                             const PureDecomposition* dec = nullptr) {
  if (trials < 1) throw std::invalid_argument("appendix_delta_check: trials must be >= 1");
  detail::require_dilation_profile(profile, d);
  if (profile.n_sites() != n_sites) {
    throw std::invalid_argument("appendix_delta_check: profile does not match n_sites");
  }

  // GHZ decomposition is the default exemplar for the pure-state chain.
  PureDecomposition ghz_dec;
  if (kind == ThresholdKind::kPure && dec == nullptr) {
    ghz_dec = decompose_pure(ghz_coeffs(d, n_sites));
    dec = &ghz_dec;
  }

  const double c_ghz = to_double(noise_constant_ghz(d, n_sites));
  const double c_gen = to_double(noise_constant_general(d, n_sites));
  const double gamma = kind == ThresholdKind::kPure ? gamma_max(*dec) : 0.0;
  const double coeff = kind == ThresholdKind::kGhz
                           ? (1.0 - beta) * c_ghz - beta / d
                           : (1.0 - beta) * c_gen - gamma * beta;

  // W and W~ per site block, cached across trials.
  std::vector<std::vector<Matrix>> w_cache(n_sites), wt_cache(n_sites);
  for (int site = 1; site < n_sites; ++site) {
    for (int j = 0; j < d; ++j) {
      for (int j1 = 0; j1 < d; ++j1) {
        w_cache[site].push_back(w_op(d, profile.settings[site], j, j1).mat);
        wt_cache[site].push_back(w_tilde_op(d, profile.settings[site], j, j1).mat);
      }
    }
  }

  const long rest = [&] {
    long r = 1;
    for (int k = 1; k < n_sites; ++k) r *= d;
    return r;
  }();
  std::vector<std::vector<int>> digits(rest, std::vector<int>(n_sites - 1));
  for (long r = 0; r < rest; ++r) {
    long v = r;
    for (int p = n_sites - 2; p >= 0; --p) {
      digits[r][p] = static_cast<int>(v % d);
      v /= d;
    }
  }

  std::vector<double> slack(static_cast<std::size_t>(trials));
  std::vector<double> delta_values(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    Rng rng(derive_seed(seed, trial));
    const Matrix x1 = random_positive_operator(d, rng).mat;
    std::vector<Matrix> xs(static_cast<std::size_t>(n_sites));
    for (int site = 1; site < n_sites; ++site) {
      long block = 1;
      for (int k = 0; k < profile.settings[site]; ++k) block *= d;
      xs[site] = random_positive_operator(static_cast<int>(block), rng).mat;
    }
    const double tr_x1 = x1.trace().real();

    // tr[W X] (complex) and tr[W~ X] (real, nonnegative) per site and pair.
    std::vector<std::vector<Complex>> tw(n_sites);
    std::vector<std::vector<double>> twt(n_sites);
    for (int site = 1; site < n_sites; ++site) {
      tw[site].resize(static_cast<std::size_t>(d) * d);
      twt[site].resize(static_cast<std::size_t>(d) * d);
      for (int j = 0; j < d; ++j) {
        for (int j1 = 0; j1 < d; ++j1) {
          const std::size_t idx = static_cast<std::size_t>(j) * d + j1;
          tw[site][idx] = (w_cache[site][idx] * xs[site]).trace();
          twt[site][idx] = (wt_cache[site][idx] * xs[site]).trace().real();
        }
      }
    }

    Complex delta = 0.0;
    double positive_sum = 0.0;
    if (kind == ThresholdKind::kGhz) {
      // noise part: Σ_{j≠j1} tr[X1] tr[W~ X_2] Π_{n>=3} Σ_{l>l1} tr[W~ X_n]
      double tail = 1.0;
      for (int site = 2; site < n_sites; ++site) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) {
          for (int l1 = 0; l1 < l; ++l1) s += twt[site][static_cast<std::size_t>(l) * d + l1];
        }
        tail *= s;
      }
      for (int j = 0; j < d; ++j) {
        for (int j1 = 0; j1 < d; ++j1) {
          if (j == j1) continue;
          const std::size_t idx = static_cast<std::size_t>(j) * d + j1;
          delta += (1.0 - beta) * c_ghz * tr_x1 * twt[1][idx] * tail;
          Complex cross = x1(j, j1);
          double pos = tr_x1;
          for (int site = 1; site < n_sites; ++site) {
            cross *= tw[site][idx];
            pos *= twt[site][idx];
          }
          delta += (beta / d) * cross;
          positive_sum += pos;
        }
      }
    } else {
      for (long ri = 0; ri < rest; ++ri) {
        for (long rj = 0; rj < rest; ++rj) {
          if (ri == rj) continue;
          double noise_term = tr_x1;
          double pos = tr_x1;
          for (int site = 1; site < n_sites; ++site) {
            const std::size_t idx =
                static_cast<std::size_t>(digits[ri][site - 1]) * d + digits[rj][site - 1];
            noise_term *= twt[site][idx];
            pos *= twt[site][idx];
          }
          delta += (1.0 - beta) * c_gen * noise_term;
          positive_sum += pos;
          if (dec->alphas[ri] == 0.0 || dec->alphas[rj] == 0.0) continue;
          Complex cross = dec->alphas[ri] * dec->alphas[rj] *
                          (dec->phis[rj].adjoint() * (x1 * dec->phis[ri]))(0);
          for (int site = 1; site < n_sites; ++site) {
            const std::size_t idx =
                static_cast<std::size_t>(digits[ri][site - 1]) * d + digits[rj][site - 1];
            cross *= tw[site][idx];
          }
          delta += beta * cross;
        }
      }
    }
    if (std::abs(delta.imag()) > 1e-9 * (1.0 + std::abs(delta.real()))) {
      throw std::logic_error("appendix_delta_check: cross terms did not pair to a real value");
    }
    slack[trial] = delta.real() - coeff * positive_sum;
    delta_values[trial] = delta.real();
  });

  DeltaChainReport report;
  report.trials = trials;
  report.seed = seed;
  report.coefficient = coeff;
  report.min_slack = slack[0];
  report.min_delta = delta_values[0];
  for (int t = 1; t < trials; ++t) {
    report.min_slack = std::min(report.min_slack, slack[t]);
    report.min_delta = std::min(report.min_delta, delta_values[t]);
  }
  return report;
}

}  // namespace bll
