#pragma once

#include <Eigen/Dense>
#include <vector>

namespace trackctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

namespace linalg {

/// Default relative threshold for numerical rank decisions.
inline constexpr double kRankTol = 1e-10;

struct SpectrumReport {
  std::vector<double> singular_values;  // descending
  int rank_estimate = 0;
  double threshold_used = 0.0;  // absolute threshold applied to the values
};

/// e^{At} by scaling and squaring with a degree-13 Pade approximant.
Matrix mat_exp(const Matrix& A, double t);

/// Coefficients [a_1..a_n] of det(lambda I - A) = lambda^n + a_1 lambda^{n-1} + ... + a_n,
/// computed with the Faddeev-LeVerrier recursion.
std::vector<double> char_poly_coeffs(const Matrix& A);

/// Kalman matrix [B, AB, ..., A^{n-1}B].
Matrix kalman_matrix(const Matrix& A, const Matrix& B);

/// Singular spectrum and numerical rank of the Kalman matrix. Values above
/// tol * sigma_max count toward the rank.
SpectrumReport kalman_rank(const Matrix& A, const Matrix& B, double tol = kRankTol);

/// Singular spectrum of an arbitrary matrix with the same rank rule.
SpectrumReport spectrum(const Matrix& M, double tol = kRankTol);

/// LU with partial pivoting. Throws Singular when the estimated condition
/// number exceeds 1e14.
Matrix solve_linear(const Matrix& M, const Matrix& rhs);

/// 2-norm condition number via SVD (infinity for singular input).
double condition_number(const Matrix& M);

}  // namespace linalg
}  // namespace trackctl
