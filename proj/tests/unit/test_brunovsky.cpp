#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "trackctl/brunovsky.hpp"
#include "trackctl/error.hpp"
#include "trackctl/linalg.hpp"

using namespace trackctl;

TEST_CASE("companion_from_coeffs") {
  const Matrix shift = companion_from_coeffs({0, 0, 0});
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 1) = 1;
  expected(1, 2) = 1;
  CHECK(shift == expected);

  Matrix bench(2, 2);
  bench << 0, 1, -2, -3;
  CHECK(companion_from_coeffs({3, 2}) == bench);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-2, 2);
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> alpha(n);
    for (auto& a : alpha) a = dist(rng);
    const auto back = linalg::char_poly_coeffs(companion_from_coeffs(alpha));
    for (int i = 0; i < n; ++i) CHECK(std::abs(back[i] - alpha[i]) <= 1e-10);
  }
}

TEST_CASE("brunovsky: canonical inputs give P = I") {
  Matrix A(2, 2);
  A << 0, 1, -2, -3;
  Vector b(2);
  b << 0, 1;
  const auto form = brunovsky_transform(A, b);
  CHECK((form.P - Matrix::Identity(2, 2)).norm() <= 1e-15);
  CHECK(form.alpha[0] == doctest::Approx(3.0));
  CHECK(form.alpha[1] == doctest::Approx(2.0));

  const std::vector<double> alpha{0.5, -1.0, 2.0, 0.25};
  Vector e4 = Vector::Zero(4);
  e4(3) = 1;
  const auto f4 = brunovsky_transform(companion_from_coeffs(alpha), e4);
  CHECK((f4.P - Matrix::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("brunovsky: residuals on random controllable pairs") {
  std::mt19937_64 rng(12);
  int tested = 0;
  while (tested < 40) {
    const int n = 2 + tested % 5;
    const Matrix A = oracle::uniform_matrix(rng, n, n);
    const Vector b = oracle::uniform_matrix(rng, n, 1);
    if (!oracle::controllable(A, b)) continue;
    ++tested;
    const auto form = brunovsky_transform(A, b);
    // Residuals recomputed here rather than trusted from the struct.
    const Matrix At = companion_from_coeffs(form.alpha);
    const double sim = (A * form.P - form.P * At).norm();
    CHECK(sim <= 1e-8 * A.norm() * form.P.norm());
    CHECK(std::abs(sim - form.similarity_residual) <= 1e-12 * (1 + sim));
    CHECK((b - form.P.col(n - 1)).norm() <= 1e-10 * b.norm());
    // Cayley-Hamilton through the recursion: A p_1 + a_n b = chi(A) b.
    const Vector ch = A * form.P.col(0) + form.alpha[n - 1] * b;
    CHECK(ch.norm() <= 1e-8 * std::max(1.0, std::pow(A.norm(), n)) * b.norm());
    CHECK((form.P * form.P_inv - Matrix::Identity(n, n)).norm() <= 1e-8);
  }
}

TEST_CASE("brunovsky: det(P) nonzero exactly when the pair is controllable") {
  std::mt19937_64 rng(13);
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    Matrix A = oracle::uniform_matrix(rng, n, n);
    Vector b = oracle::uniform_matrix(rng, n, 1);
    if (trial < 20) {
      // Decoupled last coordinate: unreachable from b.
      A.row(n - 1).head(n - 1).setZero();
      b(n - 1) = 0;
    }
    const bool full = linalg::kalman_rank(A, b).rank_estimate == n;
    bool transformed = true;
    try {
      const auto form = brunovsky_transform(A, b);
      transformed = std::abs(oracle::det_minors(form.P)) > 0;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNotControllable);
      transformed = false;
    }
    if (trial < 20) CHECK_FALSE(transformed);
    agree += (full == transformed);
  }
  CHECK(agree == 100);
}

TEST_CASE("brunovsky: argument checks") {
  CHECK_THROWS_AS(brunovsky_transform(Matrix::Zero(2, 3), Vector::Ones(2)), Error);
  CHECK_THROWS_AS(brunovsky_transform(Matrix::Zero(2, 2), Vector::Ones(3)), Error);
  CHECK_THROWS_AS(brunovsky_transform(Matrix::Zero(2, 2), Vector::Zero(2)), Error);
}
