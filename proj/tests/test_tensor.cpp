#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "bll/tensor.hpp"

using namespace bll;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

OperatorOnProduct qubit_op(Matrix m) { return {FactorSpace({2}), std::move(m)}; }

// Kronecker product straight from the definition, as an independent check of
// the library's index convention.
Matrix kron_by_definition(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      for (long k = 0; k < b.rows(); ++k)
        for (long l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

}  // namespace

TEST_CASE("kron: identities, basis projectors, diagonal expansion") {
  const OperatorOnProduct i2 = identity_operator(FactorSpace({2}));
  const OperatorOnProduct ii = kron(i2, i2);
  REQUIRE(ii.space.dims == std::vector<int>{2, 2});
  REQUIRE((ii.mat - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  // |e0><e0| ⊗ |e1><e1| has its single 1 at linear index 0*2+1 = 1.
  const OperatorOnProduct p = kron(qubit_op(diag2(1, 0)), qubit_op(diag2(0, 1)));
  for (long r = 0; r < 4; ++r)
    for (long c = 0; c < 4; ++c)
      REQUIRE(p.mat(r, c) == Complex(r == 1 && c == 1 ? 1.0 : 0.0));

  // diag(1,2) ⊗ diag(3,4) = diag(3,4,6,8), by direct hand expansion.
  const OperatorOnProduct d = kron(qubit_op(diag2(1, 2)), qubit_op(diag2(3, 4)));
  Vector expect(4);
  expect << 3.0, 4.0, 6.0, 8.0;
  REQUIRE((d.mat.diagonal() - expect).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(d.mat.cwiseAbs().sum() == Catch::Approx(21.0));
}

TEST_CASE("kron matches the definitional expansion and is associative") {
  Rng rng(11);
  const Matrix a = random_gaussian_matrix(2, rng);
  const Matrix b = random_gaussian_matrix(3, rng);
  const Matrix c = random_gaussian_matrix(2, rng);
  REQUIRE((kron(a, b) - kron_by_definition(a, b)).cwiseAbs().maxCoeff() == 0.0);
  const Matrix left = kron(kron(a, b), c);
  const Matrix right = kron(a, kron(b, c));
  REQUIRE((left - right).cwiseAbs().maxCoeff() <= 4e-15);

  // with integer entries every product is exact, so associativity holds
  // entry for entry
  const auto int_matrix = [&rng](int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = Complex(static_cast<double>(rng.below(5)) - 2.0,
                          static_cast<double>(rng.below(5)) - 2.0);
    return m;
  };
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix ia = int_matrix(2);
    const Matrix ib = int_matrix(3);
    const Matrix ic = int_matrix(2);
    REQUIRE((kron(kron(ia, ib), ic) - kron(ia, kron(ib, ic))).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("partial_trace: product states, entangled projector, keep-all") {
  // |e0 e0><e0 e0| on C2 ⊗ C2, keep factor 0.
  OperatorOnProduct p00{FactorSpace({2, 2}), Matrix::Zero(4, 4)};
  p00.mat(0, 0) = 1.0;
  const OperatorOnProduct left = partial_trace(p00, {0});
  REQUIRE(left.space.dims == std::vector<int>{2});
  REQUIRE((left.mat - diag2(1, 0)).cwiseAbs().maxCoeff() <= 1e-15);

  // Maximally entangled 2-qubit projector reduces to I/2; oracle by direct
  // summation over the traced basis.
  Vector bell(4);
  bell << 1.0, 0.0, 0.0, 1.0;
  bell /= bell.norm();
  OperatorOnProduct ent{FactorSpace({2, 2}), bell * bell.adjoint()};
  const OperatorOnProduct red = partial_trace(ent, {0});
  Matrix oracle = Matrix::Zero(2, 2);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) oracle(i, j) += ent.mat(i * 2 + k, j * 2 + k);
  REQUIRE((red.mat - oracle).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((red.mat - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  // keep = all factors leaves the operator unchanged.
  Rng rng(5);
  OperatorOnProduct w{FactorSpace({2, 3}), random_gaussian_matrix(6, rng)};
  const OperatorOnProduct same = partial_trace(w, {0, 1});
  REQUIRE((same.mat - w.mat).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE_THROWS_AS(partial_trace(w, {2}), std::out_of_range);
}

TEST_CASE("partial_trace preserves trace and factors over kron") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix ma = random_gaussian_matrix(2, rng);
    const Matrix mb = random_gaussian_matrix(3, rng);
    const OperatorOnProduct a{FactorSpace({2}), ma};
    const OperatorOnProduct b{FactorSpace({3}), mb};
    const OperatorOnProduct ab = kron(a, b);
    REQUIRE(std::abs(partial_trace(ab, {0, 1}).trace() - ab.trace()) <= 1e-12);
    // tracing the b factors yields a * tr(b)
    const OperatorOnProduct ra = partial_trace(ab, {0});
    REQUIRE((ra.mat - ma * mb.trace()).cwiseAbs().maxCoeff() <= 1e-12);
    const OperatorOnProduct rb = partial_trace(ab, {1});
    REQUIRE((rb.mat - mb * ma.trace()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("min_eigenvalue: diagonal, identity, residual bound") {
  REQUIRE(min_eigenvalue(qubit_op(diag2(1, -2))).value == Catch::Approx(-2.0));
  REQUIRE(min_eigenvalue(identity_operator(FactorSpace({5}))).value == Catch::Approx(1.0));

  Rng rng(23);
  const OperatorOnProduct h{FactorSpace({8}), random_hermitian_matrix(8, rng)};
  const MinEigenPair pair = min_eigenvalue(h);
  REQUIRE(std::abs(pair.vector.norm() - 1.0) <= 1e-12);
  const double residual = (h.mat * pair.vector - pair.value * pair.vector).norm();
  REQUIRE(residual <= kEigenResidualTol * h.mat.norm());

  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  REQUIRE_THROWS_AS(min_eigenvalue(qubit_op(skew)), std::invalid_argument);
}

TEST_CASE("trace_norm: diagonal case, density matrices, trace lower bound") {
  REQUIRE(trace_norm(qubit_op(diag2(1, -2))) == Catch::Approx(3.0));

  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    OperatorOnProduct rho = random_positive_operator(6, rng);
    rho.mat /= rho.mat.trace().real();
    REQUIRE(trace_norm(rho) == Catch::Approx(1.0).margin(1e-10));
    // |tr W| <= ||W||_1 for hermitian W
    const OperatorOnProduct w{FactorSpace({6}), random_hermitian_matrix(6, rng)};
    REQUIRE(std::abs(w.trace()) <= trace_norm(w) + 1e-12);
  }
}

TEST_CASE("embed_at_copy: single copy, identity, second-copy placement") {
  const SettingProfile profile({1, 2});
  Matrix x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  // single-setting site: x lands on the lone slot
  const OperatorOnProduct e0 = embed_at_copy(x, 0, 0, profile, 2);
  REQUIRE((e0.mat - kron(x, Matrix::Identity(4, 4))).cwiseAbs().maxCoeff() == 0.0);

  const OperatorOnProduct id_embed = embed_at_copy(Matrix::Identity(2, 2), 1, 1, profile, 2);
  REQUIRE((id_embed.mat - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);

  // diag(1,0) on copy 1 of a 2-copy site: I ⊗ diag(1,0) = diag(1,0,1,0).
  const SettingProfile single_site({2});
  REQUIRE_THROWS_AS(embed_at_copy(x, 0, 2, single_site, 2), std::out_of_range);
  const OperatorOnProduct e1 = embed_at_copy(diag2(1, 0), 0, 1, single_site, 2);
  Vector expect(4);
  expect << 1.0, 0.0, 1.0, 0.0;
  REQUIRE((e1.mat.diagonal() - expect).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(e1.mat.cwiseAbs().sum() == Catch::Approx(2.0));

  REQUIRE_THROWS_AS(embed_at_copy(Matrix::Identity(3, 3), 0, 0, profile, 2),
                    std::invalid_argument);
}

TEST_CASE("random_positive_operator: scalar case, positivity, determinism") {
  const OperatorOnProduct s = random_positive_operator(1, std::uint64_t{42});
  REQUIRE(s.mat(0, 0).real() >= 0.0);
  REQUIRE(std::abs(s.mat(0, 0).imag()) <= 1e-15);

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int dim = 1 + static_cast<int>(seed % 16);
    REQUIRE(min_eigenvalue(random_positive_operator(dim, seed)).value >= -1e-12);
  }

  const OperatorOnProduct a = random_positive_operator(5, std::uint64_t{7});
  const OperatorOnProduct b = random_positive_operator(5, std::uint64_t{7});
  REQUIRE((a.mat - b.mat).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(random_positive_operator(0, std::uint64_t{1}), std::invalid_argument);
}

TEST_CASE("trace_kron_product agrees with the materialized product") {
  Rng rng(3);
  const OperatorOnProduct t{FactorSpace({2, 3, 2}), random_gaussian_matrix(12, rng)};
  const Matrix x = random_gaussian_matrix(2, rng);
  const Matrix y = random_gaussian_matrix(3, rng);
  const Matrix z = random_gaussian_matrix(2, rng);
  const Complex fast = trace_kron_product(t, {&x, &y, &z});
  const Complex slow = (t.mat * kron_chain({x, y, z})).trace();
  REQUIRE(std::abs(fast - slow) <= 1e-12 * (1.0 + std::abs(slow)));
}

TEST_CASE("regrouped merges adjacent factors without touching entries") {
  Rng rng(9);
  const OperatorOnProduct t{FactorSpace({2, 2, 3}), random_gaussian_matrix(12, rng)};
  const OperatorOnProduct merged = t.regrouped({2, 1});
  REQUIRE(merged.space.dims == std::vector<int>{4, 3});
  REQUIRE((merged.mat - t.mat).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(t.regrouped({2, 2}), std::invalid_argument);
}
