#pragma once

#include <vector>

#include "trackctl/linalg.hpp"

namespace trackctl {

// Controllable canonical form of a single-input pair (A, b):
// A = P * A_tilde * P^{-1}, b = P * e_n.
struct BrunovskyForm {
  std::vector<double> alpha;  // characteristic polynomial coefficients a_1..a_n
  Matrix P;
  Matrix P_inv;
  Matrix A_tilde;
  double similarity_residual = 0.0;  // ||A P - P A_tilde||_F
  double input_residual = 0.0;       // ||b - P e_n||
  double condition = 0.0;            // cond_2(P)
};

/// Largest cond(P) accepted before the pair is declared uncontrollable.
inline constexpr double kMaxTransformCondition = 1e12;

/// Ones on the superdiagonal, last row (-a_n, ..., -a_1), zeros elsewhere.
Matrix companion_from_coeffs(const std::vector<double>& alpha);

/// Columns p_n = b, p_k = A p_{k+1} + a_{n-k} b. Throws NotControllable when P
/// is numerically singular (cond > 1e12).
BrunovskyForm brunovsky_transform(const Matrix& A, const Vector& b);

}  // namespace trackctl
