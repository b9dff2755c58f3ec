// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical kernels.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Truncated Taylor series sum_{k<=terms} (At)^k / k!.
inline Matrix exp_series(const Matrix& A, double t, int terms = 60) {
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = term * A * (t / k);
    sum += term;
  }
  return sum;
}

// Classic RK4 for x' = f(t, x) with a fixed step; returns x(t_end).
inline Vector rk4(const std::function<Vector(double, const Vector&)>& f, Vector x, double t0,
                  double t_end, int steps) {
  const double dt = (t_end - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = f(t, x);
    const Vector k2 = f(t + dt / 2, x + dt / 2 * k1);
    const Vector k3 = f(t + dt / 2, x + dt / 2 * k2);
    const Vector k4 = f(t + dt, x + dt * k3);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += dt;
  }
  return x;
}

// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int panels = 2000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = g(a) + g(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3;
}

// Determinant expansion by minors, fine for n <= 6.
inline double det_minors(const Matrix& M) {
  const auto n = M.rows();
  if (n == 1) return M(0, 0);
  double d = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index c2 = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, c2++) = M(r, c);
      }
    }
    d += (j % 2 ? -1.0 : 1.0) * M(0, j) * det_minors(minor);
  }
  return d;
}

inline Matrix uniform_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                             double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = dist(rng);
  return M;
}

// Kalman matrix built column by column (no shared code with the library).
inline Matrix kalman(const Matrix& A, const Matrix& B) {
  const auto n = A.rows();
  Matrix K(n, n * B.cols());
  Matrix block = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    K.middleCols(k * B.cols(), B.cols()) = block;
    block = A * block;
  }
  return K;
}

inline bool controllable(const Matrix& A, const Matrix& B, double rel = 1e-8) {
  Eigen::JacobiSVD<Matrix> svd(kalman(A, B));
  const auto& s = svd.singularValues();
  return s.size() > 0 && s(s.size() - 1) > rel * s(0);
}

}  // namespace oracle
