#include <cmath>
#include <random>

#include "doctest.h"
#include "ffgrad/operator_algebra.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ffgrad;

namespace {

double orthonormality_defect(const OperatorBasis& basis) {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Complex expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(hs_inner(basis[i], basis[j]) - expected));
    }
  return worst;
}

}  // namespace

TEST_CASE("hs_inner on Pauli matrices") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(hs_inner(ComplexMatrix::Identity(2, 2) * r, ComplexMatrix::Identity(2, 2) * r) - 1.0) < 1e-15);
  CHECK(std::abs(hs_inner(pauli('X') * r, pauli('Y') * r)) < 1e-15);
  CHECK(std::abs(hs_inner(pauli('Z'), pauli('Z')) - 2.0) < 1e-15);
  CHECK_THROWS_AS(hs_inner(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("pauli_basis layout and orthonormality") {
  const auto b1 = pauli_basis(1);
  REQUIRE(b1.size() == 4);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((b1[0] - ComplexMatrix::Identity(2, 2) * r).norm() < 1e-15);
  CHECK((b1[1] - pauli('X') * r).norm() < 1e-15);
  CHECK((b1[2] - pauli('Y') * r).norm() < 1e-15);
  CHECK((b1[3] - pauli('Z') * r).norm() < 1e-15);
  CHECK(orthonormality_defect(b1) < 1e-12);

  const auto b2 = pauli_basis(2);
  REQUIRE(b2.size() == 16);
  CHECK((b2[0] - ComplexMatrix::Identity(4, 4) * 0.5).norm() < 1e-15);
  // lexicographic: index 1 is I (x) X
  CHECK((b2[1] - 0.5 * pauli_string("IX")).norm() < 1e-15);
  CHECK((b2[4] - 0.5 * pauli_string("XI")).norm() < 1e-15);
  CHECK(orthonormality_defect(b2) < 1e-12);

  CHECK_THROWS_AS(pauli_basis(0), std::invalid_argument);
}

TEST_CASE("ggm_basis") {
  SUBCASE("d = 2 coincides with the Pauli basis") {
    const auto g = ggm_basis(2);
    const auto p = pauli_basis(1);
    for (std::size_t j = 0; j < 4; ++j) CHECK((g[j] - p[j]).norm() < 1e-15);
  }
  SUBCASE("d = 3 is orthonormal, Hermitian, traceless beyond C_0") {
    const auto g = ggm_basis(3);
    REQUIRE(g.size() == 9);
    CHECK(orthonormality_defect(g) < 1e-12);
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(hermiticity_defect(g[j]) < 1e-15);
      if (j > 0) CHECK(std::abs(g[j].trace()) < 1e-15);
    }
  }
  CHECK_THROWS_AS(ggm_basis(1), std::invalid_argument);
}

TEST_CASE("every produced basis is orthonormal") {
  for (std::size_t d = 2; d <= 9; ++d) CHECK(orthonormality_defect(ggm_basis(d)) < 1e-12);
  for (std::size_t n = 1; n <= 3; ++n) CHECK(orthonormality_defect(pauli_basis(n)) < 1e-12);
}

TEST_CASE("basis expansion reconstructs operators") {
  std::mt19937_64 rng(3);
  const auto basis = ggm_basis(3);
  const ComplexMatrix x = support::random_hermitian(rng, 3);
  const Eigen::VectorXcd c = basis.expand(x);
  ComplexMatrix back = ComplexMatrix::Zero(3, 3);
  for (std::size_t k = 0; k < basis.size(); ++k) back += c[static_cast<Eigen::Index>(k)] * basis[k];
  CHECK((back - x).norm() < 1e-13);
}

TEST_CASE("eig_hermitian") {
  SUBCASE("diagonal input") {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    const auto e = eig_hermitian(h);
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(e.eigenvalues[1] == doctest::Approx(2.0));
    CHECK((e.eigenvectors.cwiseAbs() - RealMatrix::Identity(2, 2)).norm() < 1e-15);
  }
  SUBCASE("sigma_x spectrum") {
    const auto e = eig_hermitian(pauli('X'));
    CHECK(e.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("non-Hermitian input names the entry") {
    ComplexMatrix h = pauli('X');
    h(0, 1) = 2.0;
    try {
      eig_hermitian(h);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
    }
  }
}

TEST_CASE("eigendecomposition and exponential invariants over 100 seeded cases") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(2, 6);
  std::uniform_real_distribution<double> time(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = static_cast<std::size_t>(dim(rng));
    const ComplexMatrix h = support::random_hermitian(rng, d, 10.0);
    const auto e = eig_hermitian(h);
    const auto n = static_cast<Eigen::Index>(d);
    CHECK((e.eigenvectors * e.eigenvectors.adjoint() - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
    CHECK((e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint() - h).norm() < 1e-10);
    for (Eigen::Index i = 1; i < n; ++i) CHECK(e.eigenvalues[i] >= e.eigenvalues[i - 1]);
    // |w t| <= 10 * 50 keeps well within the 1e3 bound
    const ComplexMatrix u = unitary_from_eig(e, time(rng));
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("eig_hermitian is deterministic") {
  std::mt19937_64 rng(5);
  const ComplexMatrix h = support::random_hermitian(rng, 4);
  const auto a = eig_hermitian(h);
  const auto b = eig_hermitian(h);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("unitary_from_eig agrees with the Pade exponential") {
  std::mt19937_64 rng(8);
  const ComplexMatrix h = support::random_hermitian(rng, 4, 3.0);
  CHECK((unitary_from_eig(eig_hermitian(h), 0.7) - oracle::expm_propagator(h, 0.7)).norm() < 1e-12);
}

TEST_CASE("Liouville representation of a unitary is real orthogonal") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix u = oracle::expm_propagator(support::random_hermitian(rng, 4, 5.0), 1.0);
    double residue = 1.0;
    const RealMatrix l = liouville(u, pauli_basis(2), &residue);
    CHECK(residue < 1e-12);
    CHECK((l.transpose() * l - RealMatrix::Identity(16, 16)).norm() < 1e-10);
  }
}
