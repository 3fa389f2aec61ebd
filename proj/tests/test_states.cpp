#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bll/states.hpp"

using namespace bll;

TEST_CASE("ghz_state: qubit cases and rank-1 structure") {
  // d=2, N=3: value 1/2 at the four entries with row, col in {0, 7}
  const OperatorOnProduct g23 = ghz_state(2, 3);
  REQUIRE(g23.dim() == 8);
  for (long r = 0; r < 8; ++r) {
    for (long c = 0; c < 8; ++c) {
      const double expect = ((r == 0 || r == 7) && (c == 0 || c == 7)) ? 0.5 : 0.0;
      REQUIRE(g23.mat(r, c) == Complex(expect));
    }
  }

  // d=2, N=2: Bell projector with entries 1/2 at row, col in {0, 3}
  const OperatorOnProduct g22 = ghz_state(2, 2);
  REQUIRE(g22.mat(0, 0) == Complex(0.5));
  REQUIRE(g22.mat(0, 3) == Complex(0.5));
  REQUIRE(g22.mat(3, 0) == Complex(0.5));
  REQUIRE(g22.mat(3, 3) == Complex(0.5));
  REQUIRE(g22.mat.cwiseAbs().sum() == Catch::Approx(2.0));

  for (int d : {2, 3}) {
    for (int n : {2, 3, 4}) {
      const OperatorOnProduct g = ghz_state(d, n);
      REQUIRE(std::abs(g.trace() - Complex(1.0)) <= 1e-12);
      REQUIRE(std::abs((g.mat * g.mat).trace() - Complex(1.0)) <= 1e-12);
    }
  }
}

TEST_CASE("maximally_mixed: identity over dimension") {
  const OperatorOnProduct mm = maximally_mixed(2, 3);
  REQUIRE((mm.mat - Matrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(std::abs(mm.trace() - Complex(1.0)) <= 1e-12);
  REQUIRE(min_eigenvalue(mm).value == Catch::Approx(1.0 / 8.0));
}

TEST_CASE("noisy_mixture: endpoints and spectrum of the noisy GHZ state") {
  const OperatorOnProduct g = ghz_state(2, 3);
  const OperatorOnProduct at0 = noisy_mixture(0.0, g);
  REQUIRE((at0.mat - maximally_mixed(2, 3).mat).cwiseAbs().maxCoeff() <= 1e-15);
  const OperatorOnProduct at1 = noisy_mixture(1.0, g);
  REQUIRE((at1.mat - g.mat).cwiseAbs().maxCoeff() == 0.0);

  // rank-1 base: spectrum is {beta + (1-beta)/8 once, (1-beta)/8 seven
  // times}; oracle by direct diagonalization
  const double beta = 1.0 / 9.0;
  const OperatorOnProduct mix = noisy_mixture(beta, g);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mix.mat);
  std::vector<double> eigs(solver.eigenvalues().data(), solver.eigenvalues().data() + 8);
  std::sort(eigs.begin(), eigs.end());
  const double small = (1.0 - beta) / 8.0;
  for (int k = 0; k < 7; ++k) REQUIRE(eigs[k] == Catch::Approx(small).margin(1e-12));
  REQUIRE(eigs[7] == Catch::Approx(beta + small).margin(1e-12));

  REQUIRE_THROWS_AS(noisy_mixture(1.5, g), std::domain_error);
  REQUIRE_THROWS_AS(noisy_mixture(-0.1, g), std::domain_error);

  // positive semidefinite, unit trace across a beta grid
  for (int k = 0; k <= 10; ++k) {
    const OperatorOnProduct m = noisy_mixture(k / 10.0, g);
    REQUIRE(min_eigenvalue(m).value >= -1e-12);
    REQUIRE(std::abs(m.trace() - Complex(1.0)) <= 1e-12);
  }
}

TEST_CASE("density_from_pure: basis projector, GHZ consistency, purity") {
  Vector basis = Vector::Zero(4);
  basis(2) = 1.0;
  const OperatorOnProduct p = density_from_pure({2, 2, basis});
  REQUIRE(p.mat(2, 2) == Complex(1.0));
  REQUIRE(p.mat.cwiseAbs().sum() == Catch::Approx(1.0));

  const OperatorOnProduct from_coeffs = density_from_pure(ghz_coeffs(2, 3));
  REQUIRE((from_coeffs.mat - ghz_state(2, 3).mat).cwiseAbs().maxCoeff() <= 1e-12);

  const PureStateCoeffs random = random_pure_state(3, 3, 99);
  const OperatorOnProduct rho = density_from_pure(random);
  REQUIRE(std::abs((rho.mat * rho.mat).trace() - Complex(1.0)) <= 1e-10);

  Vector bad = Vector::Zero(4);
  bad(0) = 2.0;
  REQUIRE_THROWS_AS(PureStateCoeffs(2, 2, bad), std::invalid_argument);
}

TEST_CASE("decompose_pure: GHZ weights, product state, normalization identity") {
  const PureDecomposition ghz = decompose_pure(ghz_coeffs(2, 3));
  REQUIRE(ghz.alphas.size() == 4);
  // alpha = 1/sqrt(d) on equal rest-indices, zero elsewhere; phi = e_j
  REQUIRE(ghz.alphas[0] == Catch::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(ghz.alphas[3] == Catch::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(ghz.alphas[1] == 0.0);
  REQUIRE(ghz.alphas[2] == 0.0);
  REQUIRE(ghz.phis[1].size() == 0);
  REQUIRE(std::abs(ghz.phis[0](0) - Complex(1.0)) <= 1e-12);
  REQUIRE(std::abs(ghz.phis[3](1) - Complex(1.0)) <= 1e-12);

  // product basis state e0^{⊗N}: single unit weight
  Vector prod = Vector::Zero(8);
  prod(0) = 1.0;
  const PureDecomposition dp = decompose_pure({2, 3, prod});
  REQUIRE(dp.alphas[0] == 1.0);
  REQUIRE(std::count(dp.alphas.begin(), dp.alphas.end(), 0.0) == 3);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PureDecomposition dec = decompose_pure(random_pure_state(3, 3, seed));
    double sum = 0.0;
    for (double a : dec.alphas) {
      REQUIRE(a >= 0.0);
      sum += a * a;
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-10));
    for (long r = 0; r < dec.rest_count(); ++r) {
      if (dec.alphas[r] > 0.0) REQUIRE(dec.phis[r].norm() == Catch::Approx(1.0).margin(1e-10));
    }
  }
}

TEST_CASE("decompose_pure reconstruction reproduces the state vector") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 2 + static_cast<int>(seed % 2);
    const PureStateCoeffs psi = random_pure_state(d, 3, seed);
    const Vector rebuilt = decompose_pure(psi).state_vector();
    REQUIRE((rebuilt - psi.coeffs).norm() <= 1e-9);
  }
}

TEST_CASE("gamma_max: GHZ, product state, uniform weights, pigeonhole floor") {
  REQUIRE(gamma_max(decompose_pure(ghz_coeffs(2, 3))) == Catch::Approx(0.5));

  Vector prod = Vector::Zero(8);
  prod(0) = 1.0;
  REQUIRE(gamma_max(decompose_pure({2, 3, prod})) == 1.0);

  // uniform weights over all d^{N-1} rest-indices hit the floor exactly
  const int d = 2, n = 3;
  Vector uniform = Vector::Zero(8);
  for (int r = 0; r < 4; ++r) uniform(r) = 0.5;  // m = 0 block, all rest-indices
  const PureDecomposition u = decompose_pure({d, n, uniform});
  REQUIRE(gamma_max(u) == Catch::Approx(0.25));

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int dd = 2 + static_cast<int>(seed % 2);
    const PureDecomposition dec = decompose_pure(random_pure_state(dd, 3, seed));
    const double floor = 1.0 / (dd * dd);
    REQUIRE(gamma_max(dec) >= floor - 1e-12);
  }
}
