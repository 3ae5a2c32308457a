#include "lyapcert/linalg.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace lyapcert;

namespace {

Matrix random_matrix(int d, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = u(rng);
  return A;
}

double rel_err(const Matrix& got, const Matrix& want) {
  const double denom = std::max(1.0, want.norm());
  return (got - want).norm() / denom;
}

} // namespace

TEST_SUITE("linalg") {

TEST_CASE("expm of the zero time is the exact identity") {
  Matrix A(2, 2);
  A << 3.0, -1.0, 4.0, 2.0;
  const Matrix E = expm(A, 0.0);
  CHECK(E == Matrix::Identity(2, 2));
}

TEST_CASE("expm matches the closed form on diagonal matrices") {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = -3.0;
  const Matrix E = expm(A, 2.0);
  CHECK(E(0, 0) == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
  CHECK(E(1, 1) == doctest::Approx(std::exp(-6.0)).epsilon(1e-13));
  CHECK(std::abs(E(0, 1)) < 1e-14);
  CHECK(std::abs(E(1, 0)) < 1e-14);
}

TEST_CASE("expm satisfies the semigroup identity on random matrices") {
  std::mt19937 rng(7u);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const Matrix A = random_matrix(d, rng);
    const Matrix whole = expm(A, 1.7);
    const Matrix split = expm(A, 1.0) * expm(A, 0.7);
    CHECK(rel_err(split, whole) < 1e-10);
  }
}

TEST_CASE("expm commutes with scalar shifts of the matrix") {
  std::mt19937 rng(11u);
  const Matrix A = random_matrix(3, rng);
  const double alpha = 0.8125; // dyadic so the shifted flow is exactly scaled
  const double t = 1.25;
  const Matrix shifted = expm(A - alpha * Matrix::Identity(3, 3), t);
  const Matrix scaled = std::exp(-alpha * t) * expm(A, t);
  CHECK(rel_err(shifted, scaled) < 1e-12);
}

TEST_CASE("expm is similarity invariant") {
  std::mt19937 rng(13u);
  const Matrix A = random_matrix(3, rng);
  Matrix Q = random_matrix(3, rng) + 3.0 * Matrix::Identity(3, 3);
  const Matrix Qi = Q.inverse();
  const Matrix lhs = expm(Q * A * Qi, 0.9);
  const Matrix rhs = Q * expm(A, 0.9) * Qi;
  CHECK(rel_err(lhs, rhs) < 1e-9);
}

TEST_CASE("expm rejects overflowing inputs") {
  Matrix A(1, 1);
  A << 1000.0;
  CHECK_THROWS_AS((void)expm(A, 1000.0), std::range_error);
}

TEST_CASE("eigenvalues of a rotation generator are the imaginary pair") {
  Matrix A(2, 2);
  A << 0.0, -1.0, 1.0, 0.0;
  auto ev = eigenvalues(A);
  REQUIRE(ev.size() == 2);
  std::sort(ev.begin(), ev.end(),
            [](auto a, auto b) { return a.imag() < b.imag(); });
  CHECK(ev[0].real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[0].imag() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev[1].imag() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral abscissa on reference matrices") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = -3.0;
  CHECK(spectral_abscissa(D) == doctest::Approx(1.0).epsilon(1e-13));

  Matrix A(2, 2);
  A << -0.3, 0.5, 0.2, -0.4;
  // Trace -0.7, determinant 0.02: max root of x^2 + 0.7x + 0.02.
  const double expected = (-0.7 + std::sqrt(0.49 - 0.08)) / 2.0;
  CHECK(spectral_abscissa(A) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("spectral radius of a scaled rotation is its scale") {
  const double r = 0.37;
  Matrix A(2, 2);
  A << std::cos(1.1), -std::sin(1.1), std::sin(1.1), std::cos(1.1);
  CHECK(spectral_radius(r * A) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("symmetric part range brackets the abscissa") {
  std::mt19937 rng(17u);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix A = random_matrix(3, rng, 2.0);
    const auto range = symmetric_part_range(A);
    const double sa = spectral_abscissa(A);
    CHECK(range.lo <= sa + 1e-10);
    CHECK(sa <= range.hi + 1e-10);
  }
}

TEST_CASE("symmetric part range of a skew-symmetric matrix is zero") {
  Matrix A(2, 2);
  A << 0.0, -2.0, 2.0, 0.0;
  const auto range = symmetric_part_range(A);
  CHECK(range.lo == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(range.hi == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("a single matrix of dimension two or more is always reducible") {
  Matrix A(2, 2);
  A << 1.0, 2.0, 3.0, 4.0;
  const auto verdict = is_irreducible({A});
  CHECK_FALSE(verdict.irreducible);
  CHECK(verdict.witness.cols() >= 1);
}

TEST_CASE("a common eigenvector makes a family reducible with a valid witness") {
  Matrix A(3, 3), B(3, 3);
  A << 1, 2, 3, 0, 4, 5, 0, 0, 6;
  B << -1, 1, 0, 0, -2, 2, 0, 0, -3;
  const auto verdict = is_irreducible({A, B});
  REQUIRE_FALSE(verdict.irreducible);
  REQUIRE(verdict.witness.rows() == 3);
  const int k = static_cast<int>(verdict.witness.cols());
  REQUIRE(k >= 1);
  REQUIRE(k < 3);
  // The witness must span a genuinely invariant subspace of every member:
  // residual of A*W against the column space of W must vanish.
  const Matrix W = verdict.witness;
  Eigen::ColPivHouseholderQR<Matrix> qr(W);
  for (const Matrix& M : {A, B}) {
    const Matrix img = M * W;
    const Matrix res = img - W * qr.solve(img);
    CHECK(res.norm() < 1e-8 * std::max(1.0, img.norm()));
  }
}

TEST_CASE("a rotation paired with a generic diagonal is irreducible") {
  Matrix R(2, 2), D(2, 2);
  R << 0, -1, 1, 0;
  D << 1, 0, 0, 2;
  const auto verdict = is_irreducible({R, D});
  CHECK(verdict.irreducible);
  CHECK(verdict.witness.size() == 0);
}

TEST_CASE("is_irreducible rejects malformed families") {
  CHECK_THROWS_AS((void)is_irreducible({}), std::invalid_argument);
  Matrix A(2, 2), B(3, 3);
  A.setIdentity();
  B.setIdentity();
  CHECK_THROWS_AS((void)is_irreducible({A, B}), std::invalid_argument);
}

} // TEST_SUITE
