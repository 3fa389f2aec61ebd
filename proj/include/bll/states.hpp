#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bll/tensor.hpp"

namespace bll {

inline constexpr double kStateNormTol = 1e-10;

// Coefficient tensor of an N-qudit pure state, flattened with the site-1
// index slowest (then site 2, ..., site N fastest).
struct PureStateCoeffs {
  int d = 0;
  int n_sites = 0;
  Vector coeffs;

  PureStateCoeffs() = default;
  PureStateCoeffs(int d_, int n_sites_, Vector c)
      : d(d_), n_sites(n_sites_), coeffs(std::move(c)) {
    if (d < 2 || n_sites < 2) {
      throw std::invalid_argument("PureStateCoeffs: need d >= 2 and n_sites >= 2");
    }
    long expect = 1;
    for (int k = 0; k < n_sites; ++k) expect *= d;
    if (coeffs.size() != expect) {
      throw std::invalid_argument("PureStateCoeffs: coefficient count must be d^N");
    }
    if (std::abs(coeffs.squaredNorm() - 1.0) > kStateNormTol) {
      throw std::invalid_argument("PureStateCoeffs: coefficients are not normalized");
    }
  }

  FactorSpace space() const { return FactorSpace::qudits(d, n_sites); }
};

// Splitting of a pure state over the site-1 factor: nonnegative weights
// alpha indexed by the basis multi-index of sites 2..N (site-2 slowest) and
// a unit conditional vector phi on site 1 wherever alpha > 0. Indices with
// alpha = 0 carry no phi; all downstream sums skip them.
struct PureDecomposition {
  int d = 0;
  int n_sites = 0;
  std::vector<double> alphas;     // length d^(N-1)
  std::vector<Vector> phis;       // size-0 vector where alpha == 0

  long rest_count() const { return static_cast<long>(alphas.size()); }

  // Σ alpha_{j..k} phi_{j..k} ⊗ e_j ⊗ ... ⊗ e_k, the state the decomposition
  // represents.
  Vector state_vector() const {
    const long rest = rest_count();
    Vector psi = Vector::Zero(static_cast<long>(d) * rest);
    for (long r = 0; r < rest; ++r) {
      if (alphas[r] == 0.0) continue;
      for (int m = 0; m < d; ++m) {
        psi(static_cast<long>(m) * rest + r) += alphas[r] * phis[r](m);
      }
    }
    return psi;
  }
};

// Weight of a noisy mixture: beta * base + (1 - beta) * maximally mixed.
struct NoisyMixtureSpec {
  double beta = 0.0;
  OperatorOnProduct base_state;

  NoisyMixtureSpec(double b, OperatorOnProduct base)
      : beta(b), base_state(std::move(base)) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw std::domain_error("NoisyMixtureSpec: beta must lie in [0, 1]");
    }
    if (std::abs(base_state.trace() - Complex(1.0)) > kStateNormTol) {
      throw std::invalid_argument("NoisyMixtureSpec: base state must have unit trace");
    }
    if (min_eigenvalue(base_state).value < -kStateNormTol) {
      throw std::invalid_argument("NoisyMixtureSpec: base state must be positive semidefinite");
    }
  }
};

// (1/d) Σ_{j,j1} (|e_j><e_j1|)^{⊗N}: rank-1 projector onto
// (1/√d) Σ_j e_j^{⊗N}.
inline OperatorOnProduct ghz_state(int d, int n_sites) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("ghz_state: need d >= 2 and n_sites >= 2");
  }
  FactorSpace space = FactorSpace::qudits(d, n_sites);
  const long n = space.total_dim();
  // index of the repeated basis point (j, j, ..., j)
  long rep_unit = 0;
  long p = 1;
  for (int k = 0; k < n_sites; ++k) {
    rep_unit += p;
    p *= d;
  }
  Matrix m = Matrix::Zero(n, n);
  for (int j = 0; j < d; ++j) {
    for (int j1 = 0; j1 < d; ++j1) {
      m(j * rep_unit, j1 * rep_unit) = 1.0 / d;
    }
  }
  return {std::move(space), std::move(m)};
}

inline OperatorOnProduct maximally_mixed(int d, int n_sites) {
  if (d < 2 || n_sites < 1) {
    throw std::invalid_argument("maximally_mixed: need d >= 2 and n_sites >= 1");
  }
  FactorSpace space = FactorSpace::qudits(d, n_sites);
  const long n = space.total_dim();
  return {std::move(space), Matrix::Identity(n, n) / static_cast<double>(n)};
}

inline OperatorOnProduct noisy_mixture(const NoisyMixtureSpec& spec) {
  const OperatorOnProduct& base = spec.base_state;
  const long n = base.dim();
  Matrix m = spec.beta * base.mat +
             (1.0 - spec.beta) / static_cast<double>(n) * Matrix::Identity(n, n);
  return {base.space, std::move(m)};
}

inline OperatorOnProduct noisy_mixture(double beta, const OperatorOnProduct& base) {
  return noisy_mixture(NoisyMixtureSpec(beta, base));
}

inline OperatorOnProduct density_from_pure(const PureStateCoeffs& psi) {
  return {psi.space(), psi.coeffs * psi.coeffs.adjoint()};
}

// alpha_{j..k} = (Σ_m |ς_{m j..k}|²)^{1/2}, phi_{j..k} = (1/alpha) Σ_m ς e_m.
// The pair is fully determined by the coefficients; reconstruction through
// state_vector() returns the input exactly.
inline PureDecomposition decompose_pure(const PureStateCoeffs& psi) {
  PureDecomposition dec;
  dec.d = psi.d;
  dec.n_sites = psi.n_sites;
  const long rest = psi.coeffs.size() / psi.d;
  dec.alphas.assign(rest, 0.0);
  dec.phis.assign(rest, Vector());
  for (long r = 0; r < rest; ++r) {
    double norm_sq = 0.0;
    for (int m = 0; m < psi.d; ++m) {
      norm_sq += std::norm(psi.coeffs(static_cast<long>(m) * rest + r));
    }
    if (norm_sq == 0.0) continue;
    const double alpha = std::sqrt(norm_sq);
    Vector phi(psi.d);
    for (int m = 0; m < psi.d; ++m) {
      phi(m) = psi.coeffs(static_cast<long>(m) * rest + r) / alpha;
    }
    dec.alphas[r] = alpha;
    dec.phis[r] = std::move(phi);
  }
  return dec;
}

// max_{j..k} alpha², the largest conditional weight; at least d^{-(N-1)} for
// every pure state.
inline double gamma_max(const PureDecomposition& dec) {
  double best = 0.0;
  for (double a : dec.alphas) best = std::max(best, a * a);
  return best;
}

inline PureStateCoeffs ghz_coeffs(int d, int n_sites) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("ghz_coeffs: need d >= 2 and n_sites >= 2");
  }
  long n = 1;
  for (int k = 0; k < n_sites; ++k) n *= d;
  long rep_unit = 0;
  long p = 1;
  for (int k = 0; k < n_sites; ++k) {
    rep_unit += p;
    p *= d;
  }
  Vector c = Vector::Zero(n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) c(j * rep_unit) = amp;
  return {d, n_sites, std::move(c)};
}

inline PureStateCoeffs random_pure_state(int d, int n_sites, std::uint64_t seed) {
  long n = 1;
  for (int k = 0; k < n_sites; ++k) n *= d;
  Rng rng(seed);
  Vector c(n);
  for (long i = 0; i < n; ++i) c(i) = rng.complex_gaussian();
  c /= c.norm();
  return {d, n_sites, std::move(c)};
}

}  // namespace bll
