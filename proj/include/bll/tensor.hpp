#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bll/rng.hpp"

namespace bll {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Relative hermiticity tolerance and eigenpair residual tolerance; sized for
// double precision at total dimensions up to kMaxTotalDim.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigenResidualTol = 1e-9;
inline constexpr long kMaxTotalDim = 4096;

// Ordered tensor-factor layout. The leftmost factor is the slowest-varying
// index: the linear index of (i_0, ..., i_{m-1}) is
// ((i_0 * d_1 + i_1) * d_2 + ...) + i_{m-1}. Every module in the library
// inherits this convention.
struct FactorSpace {
  std::vector<int> dims;

  FactorSpace() = default;
  explicit FactorSpace(std::vector<int> ds) : dims(std::move(ds)) {
    for (int d : dims) {
      if (d < 1) {
        throw std::invalid_argument("FactorSpace: factor dimension must be >= 1");
      }
    }
  }

  static FactorSpace qudits(int d, int count) {
    if (d < 1 || count < 0) {
      throw std::invalid_argument("FactorSpace::qudits: bad arguments");
    }
    return FactorSpace(std::vector<int>(static_cast<std::size_t>(count), d));
  }

  int factor_count() const { return static_cast<int>(dims.size()); }

  long total_dim() const {
    long t = 1;
    for (int d : dims) t *= d;
    return t;
  }

  // strides[f] = product of dims[f+1 ..]; digit f of linear index i is
  // (i / strides[f]) % dims[f].
  std::vector<long> strides() const {
    std::vector<long> s(dims.size(), 1);
    for (int f = factor_count() - 2; f >= 0; --f) {
      s[f] = s[f + 1] * dims[f + 1];
    }
    return s;
  }

  bool operator==(const FactorSpace& other) const { return dims == other.dims; }
};

// Dense complex operator tagged with its tensor-factor layout. The universal
// carrier for states, witnesses and multi-copy dilations.
struct OperatorOnProduct {
  FactorSpace space;
  Matrix mat;

  OperatorOnProduct() = default;
  OperatorOnProduct(FactorSpace s, Matrix m) : space(std::move(s)), mat(std::move(m)) {
    if (mat.rows() != mat.cols() || mat.rows() != space.total_dim()) {
      throw std::invalid_argument("OperatorOnProduct: matrix side must equal total factor dimension");
    }
  }

  long dim() const { return mat.rows(); }
  Complex trace() const { return mat.trace(); }

  double max_abs() const { return mat.cwiseAbs().maxCoeff(); }

  bool is_hermitian(double rel_tol = kHermitianTol) const {
    const double scale = max_abs();
    if (scale == 0.0) return true;
    const double dev = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    return dev <= rel_tol * scale;
  }

  // Merges consecutive factors into blocks; run_lengths partitions the factor
  // list. Entries are unchanged because merging adjacent factors only
  // relabels multi-indices under the fixed index convention.
  OperatorOnProduct regrouped(const std::vector<int>& run_lengths) const {
    int consumed = 0;
    std::vector<int> merged;
    merged.reserve(run_lengths.size());
    for (int run : run_lengths) {
      if (run < 1 || consumed + run > space.factor_count()) {
        throw std::invalid_argument("regrouped: run lengths do not partition the factors");
      }
      long block = 1;
      for (int k = 0; k < run; ++k) block *= space.dims[consumed + k];
      merged.push_back(static_cast<int>(block));
      consumed += run;
    }
    if (consumed != space.factor_count()) {
      throw std::invalid_argument("regrouped: run lengths do not partition the factors");
    }
    return {FactorSpace(std::move(merged)), mat};
  }
};

inline OperatorOnProduct identity_operator(const FactorSpace& space) {
  const long n = space.total_dim();
  return {space, Matrix::Identity(n, n)};
}

// Kronecker product under the fixed index convention:
// (a ⊗ b)(i*q + k, j*q + l) = a(i, j) b(k, l).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline OperatorOnProduct kron(const OperatorOnProduct& a, const OperatorOnProduct& b) {
  std::vector<int> dims = a.space.dims;
  dims.insert(dims.end(), b.space.dims.begin(), b.space.dims.end());
  return {FactorSpace(std::move(dims)), kron(a.mat, b.mat)};
}

inline Matrix kron_chain(const std::vector<Matrix>& mats) {
  if (mats.empty()) return Matrix::Identity(1, 1);
  Matrix out = mats.front();
  for (std::size_t i = 1; i < mats.size(); ++i) out = kron(out, mats[i]);
  return out;
}

inline Matrix kron_power(const Matrix& m, int power) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < power; ++i) out = kron(out, m);
  return out;
}

inline Vector kron_vectors(const std::vector<Vector>& vs) {
  Vector out = Vector::Ones(1);
  for (const Vector& v : vs) {
    Vector next(out.size() * v.size());
    for (long i = 0; i < out.size(); ++i) {
      next.segment(i * v.size(), v.size()) = out(i) * v;
    }
    out.swap(next);
  }
  return out;
}

// Trace over the complement of `keep`; the result lives on the kept factors
// in their original relative order. keep = all factors returns a copy,
// keep = {} returns the 1x1 trace.
inline OperatorOnProduct partial_trace(const OperatorOnProduct& op, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int f : keep) {
    if (f < 0 || f >= op.space.factor_count()) {
      throw std::out_of_range("partial_trace: factor index out of range");
    }
  }
  const auto strides = op.space.strides();
  std::vector<int> traced;
  for (int f = 0; f < op.space.factor_count(); ++f) {
    if (!std::binary_search(keep.begin(), keep.end(), f)) traced.push_back(f);
  }

  // Linear offsets of every kept multi-index and every traced multi-index.
  const auto offsets = [&](const std::vector<int>& factors) {
    std::vector<long> out{0};
    for (int f : factors) {
      std::vector<long> next;
      next.reserve(out.size() * op.space.dims[f]);
      for (long base : out) {
        for (int i = 0; i < op.space.dims[f]; ++i) next.push_back(base + i * strides[f]);
      }
      out.swap(next);
    }
    return out;
  };
  const std::vector<long> kept_off = offsets(keep);
  const std::vector<long> traced_off = offsets(traced);

  std::vector<int> kept_dims;
  for (int f : keep) kept_dims.push_back(op.space.dims[f]);
  FactorSpace out_space{kept_dims};
  Matrix out = Matrix::Zero(static_cast<long>(kept_off.size()), static_cast<long>(kept_off.size()));
  for (std::size_t r = 0; r < kept_off.size(); ++r) {
    for (std::size_t c = 0; c < kept_off.size(); ++c) {
      Complex acc = 0.0;
      for (long t : traced_off) acc += op.mat(kept_off[r] + t, kept_off[c] + t);
      out(static_cast<long>(r), static_cast<long>(c)) = acc;
    }
  }
  return {std::move(out_space), std::move(out)};
}

struct MinEigenPair {
  double value = 0.0;
  Vector vector;
};

// Smallest eigenvalue and a unit eigenvector of a hermitian operator.
inline MinEigenPair min_eigenvalue(const OperatorOnProduct& op) {
  if (!op.is_hermitian()) {
    throw std::invalid_argument("min_eigenvalue: operator is not hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.mat);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("min_eigenvalue: eigensolver failed");
  }
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

// Sum of absolute eigenvalues for hermitian input, singular values otherwise.
inline double trace_norm(const OperatorOnProduct& op) {
  if (op.is_hermitian()) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.mat);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("trace_norm: eigensolver failed");
    }
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(op.mat);
  return svd.singularValues().sum();
}

// Numbers of measurement settings per site, (S_1, ..., S_N). The dilation
// space attaches S_n copies of C^d to site n.
struct SettingProfile {
  std::vector<int> settings;

  SettingProfile() = default;
  explicit SettingProfile(std::vector<int> s) : settings(std::move(s)) {
    if (settings.empty()) {
      throw std::invalid_argument("SettingProfile: at least one site required");
    }
    for (int v : settings) {
      if (v < 1) throw std::invalid_argument("SettingProfile: settings must be >= 1");
    }
  }

  int n_sites() const { return static_cast<int>(settings.size()); }

  int copies_total() const {
    return std::accumulate(settings.begin(), settings.end(), 0);
  }

  // First copy-slot index of a site's block within the dilation factor list.
  int site_offset(int site) const {
    check_site(site);
    return std::accumulate(settings.begin(), settings.begin() + site, 0);
  }

  FactorSpace dilation_space(int d) const {
    return FactorSpace::qudits(d, copies_total());
  }

  bool first_site_single() const { return settings.front() == 1; }

  void check_site(int site) const {
    if (site < 0 || site >= n_sites()) {
      throw std::out_of_range("SettingProfile: site index out of range");
    }
  }

  bool operator==(const SettingProfile& other) const {
    return settings == other.settings;
  }
};

// I ⊗ ... ⊗ x ⊗ ... ⊗ I on the full dilation space: x acts on the given copy
// slot of the given site, identity everywhere else.
inline OperatorOnProduct embed_at_copy(const Matrix& x, int site, int copy,
                                       const SettingProfile& profile, int d) {
  profile.check_site(site);
  if (copy < 0 || copy >= profile.settings[site]) {
    throw std::out_of_range("embed_at_copy: copy index out of range");
  }
  if (x.rows() != d || x.cols() != d) {
    throw std::invalid_argument("embed_at_copy: operator dimension mismatch");
  }
  const int slot = profile.site_offset(site) + copy;
  const int total = profile.copies_total();
  long left = 1, right = 1;
  for (int f = 0; f < slot; ++f) left *= d;
  for (int f = slot + 1; f < total; ++f) right *= d;
  Matrix m = kron(kron(Matrix::Identity(left, left), x), Matrix::Identity(right, right));
  return {profile.dilation_space(d), std::move(m)};
}

inline Matrix random_gaussian_matrix(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  }
  return g;
}

inline Matrix random_hermitian_matrix(int dim, Rng& rng) {
  const Matrix g = random_gaussian_matrix(dim, rng);
  return 0.5 * (g + g.adjoint());
}

inline Vector random_unit_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
  const double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / n;
}

// G G* with independent standard complex Gaussian entries of G; positive
// semidefinite by construction and reproducible from the seed.
inline OperatorOnProduct random_positive_operator(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_positive_operator: dim must be >= 1");
  const Matrix g = random_gaussian_matrix(dim, rng);
  return {FactorSpace({dim}), g * g.adjoint()};
}

inline OperatorOnProduct random_positive_operator(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_positive_operator(dim, rng);
}

// tr[op · (M_0 ⊗ M_1 ⊗ ...)] without materializing the Kronecker product:
// tr[T K] = Σ_{r,c} T(r,c) Π_f M_f(c_f, r_f).
inline Complex trace_kron_product(const OperatorOnProduct& op,
                                  const std::vector<const Matrix*>& factors) {
  const int m = op.space.factor_count();
  if (static_cast<int>(factors.size()) != m) {
    throw std::invalid_argument("trace_kron_product: factor count mismatch");
  }
  for (int f = 0; f < m; ++f) {
    if (factors[f]->rows() != op.space.dims[f] || factors[f]->cols() != op.space.dims[f]) {
      throw std::invalid_argument("trace_kron_product: factor dimension mismatch");
    }
  }
  const long n = op.dim();
  const auto strides = op.space.strides();
  std::vector<std::vector<int>> digit(m, std::vector<int>(n));
  for (int f = 0; f < m; ++f) {
    for (long i = 0; i < n; ++i) {
      digit[f][i] = static_cast<int>((i / strides[f]) % op.space.dims[f]);
    }
  }
  Complex total = 0.0;
  for (long r = 0; r < n; ++r) {
    for (long c = 0; c < n; ++c) {
      const Complex v = op.mat(r, c);
      if (v == 0.0) continue;
      Complex k = 1.0;
      for (int f = 0; f < m; ++f) k *= (*factors[f])(digit[f][c], digit[f][r]);
      total += v * k;
    }
  }
  return total;
}

}  // namespace bll
