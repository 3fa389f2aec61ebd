#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bll/parallel.hpp"
#include "bll/rational.hpp"
#include "bll/rng.hpp"
#include "bll/states.hpp"
#include "bll/tensor.hpp"

namespace bll {

inline constexpr double kDilationTol = 1e-9;
// Placement combinations up to this count are checked exhaustively; larger
// profiles are sampled.
inline constexpr long kExhaustivePlacementCap = 256;

// Self-adjoint unit-trace dilation of `target` to the multi-copy space of
// `profile`: tracing T against single-copy placements of local operators
// reproduces every product expectation of the target state.
struct SourceOperator {
  OperatorOnProduct op;      // on profile.dilation_space(d), one factor per copy
  SettingProfile profile;
  int d = 0;
  OperatorOnProduct target;  // N-qudit density matrix being dilated

  // View with one factor per site block, (C^d)^{⊗S_n} merged; this is the
  // factorization tensor positivity is judged against.
  OperatorOnProduct site_block_operator() const {
    return op.regrouped(profile.settings);
  }
};

namespace detail {

inline void require_dilation_profile(const SettingProfile& profile, int d) {
  if (profile.n_sites() < 2) {
    throw std::invalid_argument("source operator: need at least two sites");
  }
  if (!profile.first_site_single()) {
    throw std::invalid_argument("source operator: first site must have a single setting");
  }
  long total = 1;
  for (int s : profile.settings) {
    for (int k = 0; k < s; ++k) {
      total *= d;
      if (total > kMaxTotalDim) {
        throw std::invalid_argument("source operator: dilation space exceeds the dense size cap");
      }
    }
  }
}

inline Matrix unit_projector(int d, int j) {
  Matrix m = Matrix::Zero(d, d);
  m(j, j) = 1.0;
  return m;
}

inline Matrix matrix_unit(int d, int j, int j1) {
  Matrix m = Matrix::Zero(d, d);
  m(j, j1) = 1.0;
  return m;
}

// Normalized projector onto e_j + z * e_j1.
inline Matrix ray_projector(int d, int j, int j1, Complex z) {
  Vector u = Vector::Zero(d);
  u(j) += 1.0;
  u(j1) += z;
  u /= u.norm();
  return u * u.adjoint();
}

}  // namespace detail

// Copy-symmetric operator W_{j j1} on (C^d)^{⊗s} with
//   W_{jj}    = (|e_j><e_j|)^{⊗s},
//   W_{jj1}   = [P_+^{⊗s} - P_-^{⊗s} + i P_{+i}^{⊗s} - i P_{-i}^{⊗s}] / 2
// for j != j1, where P_± projects onto e_j ± e_j1 and P_{±i} onto
// e_j ± i e_j1. Tracing out any s-1 copies leaves the matrix unit
// |e_j><e_j1|, and (W_{jj1})* = W_{j1 j}.
inline OperatorOnProduct w_op(int d, int s, int j, int j1) {
  if (d < 2 || s < 1) throw std::invalid_argument("w_op: need d >= 2 and s >= 1");
  if (j < 0 || j >= d || j1 < 0 || j1 >= d) {
    throw std::out_of_range("w_op: basis index out of range");
  }
  FactorSpace space = FactorSpace::qudits(d, s);
  if (j == j1) {
    return {std::move(space), kron_power(detail::unit_projector(d, j), s)};
  }
  const Complex i(0.0, 1.0);
  Matrix m = 0.5 * (kron_power(detail::ray_projector(d, j, j1, 1.0), s) -
                    kron_power(detail::ray_projector(d, j, j1, -1.0), s) +
                    i * kron_power(detail::ray_projector(d, j, j1, i), s) -
                    i * kron_power(detail::ray_projector(d, j, j1, -i), s));
  return {std::move(space), std::move(m)};
}

// Positive counterpart of w_op: the same four projector powers combined with
// all-plus signs. Symmetric in (j, j1); tracing out any s-1 copies leaves
// |e_j><e_j| + |e_j1><e_j1| when j != j1.
inline OperatorOnProduct w_tilde_op(int d, int s, int j, int j1) {
  if (d < 2 || s < 1) throw std::invalid_argument("w_tilde_op: need d >= 2 and s >= 1");
  if (j < 0 || j >= d || j1 < 0 || j1 >= d) {
    throw std::out_of_range("w_tilde_op: basis index out of range");
  }
  FactorSpace space = FactorSpace::qudits(d, s);
  if (j == j1) {
    return {std::move(space), kron_power(detail::unit_projector(d, j), s)};
  }
  const Complex i(0.0, 1.0);
  Matrix m = 0.5 * (kron_power(detail::ray_projector(d, j, j1, 1.0), s) +
                    kron_power(detail::ray_projector(d, j, j1, -1.0), s) +
                    kron_power(detail::ray_projector(d, j, j1, i), s) +
                    kron_power(detail::ray_projector(d, j, j1, -i), s));
  return {std::move(space), std::move(m)};
}

// Normalization constant making the all-pairs W-tilde chain a dilation of
// the maximally mixed state: 1 / (2 d^N (d-1)^{N-1}).
inline Rational noise_constant_ghz(int d, int n_sites) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("noise_constant_ghz: need d >= 2 and N >= 2");
  }
  return Rational(1, 2 * ipow(d, static_cast<unsigned>(n_sites)) *
                         ipow(d - 1, static_cast<unsigned>(n_sites - 1)));
}

// 1 / (d^N ((2d-1)^{N-1} - 1)); the denominator degenerates only at N = 1.
inline Rational noise_constant_general(int d, int n_sites) {
  if (d < 2) throw std::invalid_argument("noise_constant_general: need d >= 2");
  if (n_sites < 2) {
    throw std::domain_error("noise_constant_general: undefined for fewer than two sites");
  }
  const BigInt den = ipow(d, static_cast<unsigned>(n_sites)) *
                     (ipow(2 * d - 1, static_cast<unsigned>(n_sites - 1)) - 1);
  return Rational(1, den);
}

// T = (1/d) Σ_{j,j1} |e_j><e_j1| ⊗ W_{jj1}^{(S_2)} ⊗ ... ⊗ W_{jj1}^{(S_N)};
// reduces to the GHZ density matrix under one-copy-per-site partial traces.
// With an all-ones profile it is the GHZ state itself.
inline SourceOperator ghz_source(int d, const SettingProfile& profile) {
  detail::require_dilation_profile(profile, d);
  const int n_sites = profile.n_sites();
  FactorSpace space = profile.dilation_space(d);
  const long n = space.total_dim();
  Matrix total = Matrix::Zero(n, n);
  for (int j = 0; j < d; ++j) {
    for (int j1 = 0; j1 < d; ++j1) {
      Matrix term = detail::matrix_unit(d, j, j1);
      for (int site = 1; site < n_sites; ++site) {
        term = kron(term, w_op(d, profile.settings[site], j, j1).mat);
      }
      total += term;
    }
  }
  total /= static_cast<double>(d);
  return {{std::move(space), std::move(total)}, profile, d, ghz_state(d, n_sites)};
}

// T = C Σ_{j≠j1} I ⊗ W~_{jj1}^{(S_2)} ⊗ Σ_{l>l1} W~_{ll1}^{(S_3)} ⊗ ...,
// positive by construction; dilation of the maximally mixed state. The sums
// factor per site block.
inline SourceOperator noise_source_ghz(int d, int n_sites, const SettingProfile& profile) {
  if (profile.n_sites() != n_sites) {
    throw std::invalid_argument("noise_source_ghz: profile does not match n_sites");
  }
  detail::require_dilation_profile(profile, d);
  Matrix total = Matrix::Identity(d, d);
  for (int site = 1; site < n_sites; ++site) {
    const int s = profile.settings[site];
    const long block = w_tilde_op(d, s, 0, 0).dim();
    Matrix sum = Matrix::Zero(block, block);
    if (site == 1) {
      for (int j = 0; j < d; ++j) {
        for (int j1 = 0; j1 < d; ++j1) {
          if (j != j1) sum += w_tilde_op(d, s, j, j1).mat;
        }
      }
    } else {
      for (int l = 0; l < d; ++l) {
        for (int l1 = 0; l1 < l; ++l1) sum += w_tilde_op(d, s, l, l1).mat;
      }
    }
    total = kron(total, sum);
  }
  total *= to_double(noise_constant_ghz(d, n_sites));
  return {{profile.dilation_space(d), std::move(total)}, profile, d,
          maximally_mixed(d, n_sites)};
}

// T = Σ α_I α_J |phi_I><phi_J| ⊗ W_{I_2 J_2}^{(S_2)} ⊗ ... over multi-index
// pairs with nonzero weight; dilation of the pure state the decomposition
// represents. Specializes to ghz_source on the GHZ decomposition.
inline SourceOperator pure_source(const PureDecomposition& dec, const SettingProfile& profile) {
  const int d = dec.d;
  const int n_sites = dec.n_sites;
  if (profile.n_sites() != n_sites) {
    throw std::invalid_argument("pure_source: profile does not match the decomposition");
  }
  detail::require_dilation_profile(profile, d);

  // W cache per site block and index pair.
  std::vector<std::vector<Matrix>> w_cache(n_sites);
  for (int site = 1; site < n_sites; ++site) {
    w_cache[site].reserve(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j) {
      for (int j1 = 0; j1 < d; ++j1) {
        w_cache[site].push_back(w_op(d, profile.settings[site], j, j1).mat);
      }
    }
  }

  const long rest = dec.rest_count();
  // digit r -> per-site basis index, site 2 slowest
  std::vector<std::vector<int>> digits(rest, std::vector<int>(n_sites - 1));
  for (long r = 0; r < rest; ++r) {
    long v = r;
    for (int p = n_sites - 2; p >= 0; --p) {
      digits[r][p] = static_cast<int>(v % d);
      v /= d;
    }
  }

  FactorSpace space = profile.dilation_space(d);
  const long n = space.total_dim();
  Matrix total = Matrix::Zero(n, n);
  for (long ri = 0; ri < rest; ++ri) {
    if (dec.alphas[ri] == 0.0) continue;
    for (long rj = 0; rj < rest; ++rj) {
      if (dec.alphas[rj] == 0.0) continue;
      Matrix term = dec.phis[ri] * dec.phis[rj].adjoint();
      for (int site = 1; site < n_sites; ++site) {
        const int j = digits[ri][site - 1];
        const int j1 = digits[rj][site - 1];
        term = kron(term, w_cache[site][static_cast<std::size_t>(j) * d + j1]);
      }
      total += dec.alphas[ri] * dec.alphas[rj] * term;
    }
  }
  const Vector psi = dec.state_vector();
  OperatorOnProduct target{FactorSpace::qudits(d, n_sites), psi * psi.adjoint()};
  return {{std::move(space), std::move(total)}, profile, d, std::move(target)};
}

// T = C~ Σ over distinct multi-index pairs of I ⊗ W~ ⊗ ... ⊗ W~; computed as
// (full chain) - (diagonal chain). Positive; dilation of the maximally mixed
// state.
inline SourceOperator noise_source_general(int d, int n_sites, const SettingProfile& profile) {
  if (profile.n_sites() != n_sites) {
    throw std::invalid_argument("noise_source_general: profile does not match n_sites");
  }
  const Rational constant = noise_constant_general(d, n_sites);  // validates d, N
  detail::require_dilation_profile(profile, d);

  Matrix full = Matrix::Identity(d, d);
  Matrix diag = Matrix::Identity(d, d);
  for (int site = 1; site < n_sites; ++site) {
    const int s = profile.settings[site];
    const long block = w_tilde_op(d, s, 0, 0).dim();
    Matrix sum_full = Matrix::Zero(block, block);
    Matrix sum_diag = Matrix::Zero(block, block);
    for (int j = 0; j < d; ++j) {
      for (int j1 = 0; j1 < d; ++j1) {
        const Matrix w = w_tilde_op(d, s, j, j1).mat;
        sum_full += w;
        if (j == j1) sum_diag += w;
      }
    }
    full = kron(full, sum_full);
    diag = kron(diag, sum_diag);
  }
  Matrix total = to_double(constant) * (full - diag);
  return {{profile.dilation_space(d), std::move(total)}, profile, d,
          maximally_mixed(d, n_sites)};
}

// beta * signal + (1 - beta) * noise; the target becomes the corresponding
// white-noise mixture of the signal target.
inline SourceOperator mixture_source(double beta, const SourceOperator& signal,
                                     const SourceOperator& noise) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::domain_error("mixture_source: beta must lie in [0, 1]");
  }
  if (!(signal.profile == noise.profile) || signal.d != noise.d) {
    throw std::invalid_argument("mixture_source: signal and noise profiles must match");
  }
  const OperatorOnProduct mm = maximally_mixed(noise.d, noise.profile.n_sites());
  if ((noise.target.mat - mm.mat).cwiseAbs().maxCoeff() > kStateNormTol) {
    throw std::invalid_argument("mixture_source: noise target must be the maximally mixed state");
  }
  OperatorOnProduct op{signal.op.space, beta * signal.op.mat + (1.0 - beta) * noise.op.mat};
  return {std::move(op), signal.profile, signal.d, noisy_mixture(beta, signal.target)};
}

// Convex combination Σ ξ_j T_j of source operators sharing a profile; dilates
// the matching mixture of targets. Weights must form a probability vector.
inline SourceOperator mixture_source(const std::vector<double>& weights,
                                     const std::vector<SourceOperator>& parts) {
  if (weights.empty() || weights.size() != parts.size()) {
    throw std::invalid_argument("mixture_source: need one weight per source operator");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("mixture_source: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture_source: weights must sum to one");
  }
  for (const SourceOperator& p : parts) {
    if (!(p.profile == parts.front().profile) || p.d != parts.front().d) {
      throw std::invalid_argument("mixture_source: profiles must match");
    }
  }
  Matrix op = Matrix::Zero(parts.front().op.dim(), parts.front().op.dim());
  Matrix target = Matrix::Zero(parts.front().target.dim(), parts.front().target.dim());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    op += weights[i] * parts[i].op.mat;
    target += weights[i] * parts[i].target.mat;
  }
  return {{parts.front().op.space, std::move(op)},
          parts.front().profile,
          parts.front().d,
          {parts.front().target.space, std::move(target)}};
}

struct DilationReport {
  int trials = 0;
  std::uint64_t seed = 0;
  long placement_combinations = 0;
  bool exhaustive = true;
  double max_residual = 0.0;
};

// Checks the defining dilation relation on random local operators: for each
// trial, draws hermitian X_n per site and compares
// tr[T · (placements of X_1, ..., X_N)] against tr[rho · X_1 ⊗ ... ⊗ X_N]
// for every copy placement (sampled beyond the exhaustive cap).
inline DilationReport verify_dilation(const SourceOperator& src, int trials,
                                      std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_dilation: trials must be >= 1");
  const int n_sites = src.profile.n_sites();
  const int d = src.d;
  long combos = 1;
  for (int s : src.profile.settings) combos *= s;
  const bool exhaustive = combos <= kExhaustivePlacementCap;
  const long placements = exhaustive ? combos : kExhaustivePlacementCap;

  const Matrix id = Matrix::Identity(d, d);
  std::vector<double> residual(static_cast<std::size_t>(trials), 0.0);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    Rng rng(derive_seed(seed, trial));
    std::vector<Matrix> local(static_cast<std::size_t>(n_sites));
    std::vector<const Matrix*> site_ptrs(static_cast<std::size_t>(n_sites));
    for (int nsite = 0; nsite < n_sites; ++nsite) {
      local[nsite] = random_hermitian_matrix(d, rng);
      site_ptrs[nsite] = &local[nsite];
    }
    const Complex rhs = trace_kron_product(src.target, site_ptrs);

    std::vector<int> placement(static_cast<std::size_t>(n_sites), 0);
    const auto decode = [&](long code) {
      for (int nsite = n_sites - 1; nsite >= 0; --nsite) {
        placement[nsite] = static_cast<int>(code % src.profile.settings[nsite]);
        code /= src.profile.settings[nsite];
      }
    };
    double worst = 0.0;
    std::vector<const Matrix*> copy_ptrs(static_cast<std::size_t>(src.profile.copies_total()));
    for (long p = 0; p < placements; ++p) {
      if (exhaustive) {
        decode(p);
      } else {
        for (int nsite = 0; nsite < n_sites; ++nsite) {
          placement[nsite] = static_cast<int>(rng.below(src.profile.settings[nsite]));
        }
      }
      int slot = 0;
      for (int nsite = 0; nsite < n_sites; ++nsite) {
        for (int c = 0; c < src.profile.settings[nsite]; ++c, ++slot) {
          copy_ptrs[slot] = (c == placement[nsite]) ? &local[nsite] : &id;
        }
      }
      const Complex lhs = trace_kron_product(src.op, copy_ptrs);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    residual[trial] = worst;
  });

  DilationReport report;
  report.trials = trials;
  report.seed = seed;
  report.placement_combinations = combos;
  report.exhaustive = exhaustive;
  for (double r : residual) report.max_residual = std::max(report.max_residual, r);
  return report;
}

}  // namespace bll
