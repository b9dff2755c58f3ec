#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "trackctl/error.hpp"
#include "trackctl/linalg.hpp"

using namespace trackctl;
using trackctl::linalg::char_poly_coeffs;
using trackctl::linalg::mat_exp;

namespace {

Matrix bench() {
  Matrix A(2, 2);
  A << 0, 1, -2, -3;
  return A;
}

}  // namespace

TEST_CASE("mat_exp: zero time gives the identity") {
  std::mt19937_64 rng(1);
  const Matrix A = oracle::uniform_matrix(rng, 4, 4, -3, 3);
  CHECK((mat_exp(A, 0.0) - Matrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("mat_exp: diagonal matrix") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  const Matrix X = mat_exp(D, 1.0);
  CHECK(X(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(X(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  CHECK(std::abs(X(0, 1)) < 1e-300);
  CHECK(std::abs(X(1, 0)) < 1e-300);
}

TEST_CASE("mat_exp: benchmark matrix agrees with the Taylor series") {
  const Matrix A = bench();
  CHECK((mat_exp(A, 1.0) - oracle::exp_series(A, 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
  // Closed form: eigenvalues -1, -2.
  const double t = 0.7;
  const double e1 = std::exp(-t), e2 = std::exp(-2 * t);
  Matrix X(2, 2);
  X << 2 * e1 - e2, e1 - e2, -2 * e1 + 2 * e2, -e1 + 2 * e2;
  CHECK((mat_exp(A, t) - X).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("mat_exp: large norms go through squaring") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix A = oracle::uniform_matrix(rng, 5, 5);
    const double t = 4.0;
    // Series oracle with many terms stays accurate here since ||A t|| is modest.
    const Matrix ref = oracle::exp_series(A, t, 120);
    CHECK((mat_exp(A, t) - ref).norm() <= 1e-11 * ref.norm());
  }
}

TEST_CASE("mat_exp: semigroup property") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const Matrix A = oracle::uniform_matrix(rng, n, n);
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    const double s = 0.3 + 0.1 * trial, t = 20.0 / norm - s;
    if (t <= 0) continue;
    const Matrix lhs = mat_exp(A, s + t);
    CHECK((lhs - mat_exp(A, s) * mat_exp(A, t)).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("mat_exp: rejects non-square input") {
  CHECK_THROWS_AS(mat_exp(Matrix::Zero(2, 3), 1.0), Error);
}

TEST_CASE("char_poly_coeffs: small cases") {
  const auto zero = char_poly_coeffs(Matrix::Zero(2, 2));
  REQUIRE(zero.size() == 2);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  const auto b = char_poly_coeffs(bench());
  CHECK(b[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(2.0).epsilon(1e-15));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  const auto d = char_poly_coeffs(D);
  CHECK(d[0] == doctest::Approx(-3.0));
  CHECK(d[1] == doctest::Approx(2.0));
}

TEST_CASE("char_poly_coeffs: Cayley-Hamilton on random matrices") {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix A = oracle::uniform_matrix(rng, n, n);
      const auto alpha = char_poly_coeffs(A);
      Matrix chi = Matrix::Identity(n, n);
      for (int k = 0; k < n; ++k) chi = chi * A + alpha[k] * Matrix::Identity(n, n);
      const double scale = std::pow(A.norm(), n);
      CHECK(chi.norm() <= 1e-8 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("char_poly_coeffs: agrees with det(lambda I - A) at sample points") {
  std::mt19937_64 rng(5);
  const Matrix A = oracle::uniform_matrix(rng, 5, 5);
  const auto alpha = char_poly_coeffs(A);
  for (double lambda : {-1.3, 0.0, 0.4, 2.2}) {
    double poly = 1.0;
    for (double a : alpha) poly = poly * lambda + a;
    const double det = oracle::det_minors(lambda * Matrix::Identity(5, 5) - A);
    CHECK(poly == doctest::Approx(det).epsilon(1e-10));
  }
}

TEST_CASE("kalman_rank: documented cases") {
  Matrix b(2, 1);
  b << 0, 1;
  CHECK(linalg::kalman_rank(bench(), b).rank_estimate == 2);
  CHECK(linalg::kalman_rank(bench(), Matrix::Zero(2, 1)).rank_estimate == 0);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  Matrix e1(2, 1);
  e1 << 1, 0;
  CHECK(linalg::kalman_rank(D, e1).rank_estimate == 1);
}

TEST_CASE("kalman_rank: invariant under similarity") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    Matrix A = oracle::uniform_matrix(rng, n, n);
    Matrix B = oracle::uniform_matrix(rng, n, 1);
    if (trial % 3 == 0) {
      // Block-triangular: the last coordinate is unreachable.
      A.row(n - 1).head(n - 1).setZero();
      B(n - 1, 0) = 0;
    }
    const Matrix S = Matrix::Identity(n, n) + 0.3 * oracle::uniform_matrix(rng, n, n);
    const Matrix Si = S.inverse();
    CHECK(linalg::kalman_rank(A, B).rank_estimate == linalg::kalman_rank(S * A * Si, S * B).rank_estimate);
  }
}

TEST_CASE("kalman_matrix: column blocks") {
  std::mt19937_64 rng(7);
  const Matrix A = oracle::uniform_matrix(rng, 3, 3);
  const Matrix B = oracle::uniform_matrix(rng, 3, 2);
  CHECK((linalg::kalman_matrix(A, B) - oracle::kalman(A, B)).norm() <= 1e-15);
}

TEST_CASE("solve_linear") {
  const Matrix rhs = Matrix::Random(3, 2);
  CHECK((linalg::solve_linear(Matrix::Identity(3, 3), rhs) - rhs).norm() == 0.0);

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2;
  D(1, 1) = 4;
  Vector r(2);
  r << 2, 4;
  const Matrix x = linalg::solve_linear(D, r);
  CHECK(x(0, 0) == 1.0);
  CHECK(x(1, 0) == 1.0);

  std::mt19937_64 rng(8);
  const Matrix M = oracle::uniform_matrix(rng, 5, 5) + 5 * Matrix::Identity(5, 5);
  const Matrix b = oracle::uniform_matrix(rng, 5, 1);
  CHECK((M * linalg::solve_linear(M, b) - b).norm() <= 1e-10);

  CHECK_THROWS_AS(linalg::solve_linear(Matrix::Zero(3, 3), rhs), Error);
  try {
    linalg::solve_linear(Matrix::Zero(3, 3), rhs);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingular);
  }
}

TEST_CASE("spectrum: rank threshold is relative") {
  Matrix M = Matrix::Zero(3, 3);
  M(0, 0) = 1;
  M(1, 1) = 1e-6;
  M(2, 2) = 1e-13;
  const auto report = linalg::spectrum(M);
  CHECK(report.rank_estimate == 2);
  CHECK(report.threshold_used == doctest::Approx(1e-10));
  CHECK(report.singular_values.front() == doctest::Approx(1.0));
}
