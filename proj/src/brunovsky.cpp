#include "trackctl/brunovsky.hpp"

#include <string>

#include "trackctl/error.hpp"

namespace trackctl {

Matrix companion_from_coeffs(const std::vector<double>& alpha) {
  const auto n = static_cast<Eigen::Index>(alpha.size());
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "companion matrix needs n >= 1");
  Matrix C = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) C(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) C(n - 1, j) = -alpha[static_cast<std::size_t>(n - 1 - j)];
  return C;
}

BrunovskyForm brunovsky_transform(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorCode::kNonSquare, "brunovsky_transform: A must be square");
  }
  const Eigen::Index n = A.rows();
  if (n < 1 || b.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "brunovsky_transform: b must have length " + std::to_string(n));
  }

  BrunovskyForm form;
  form.alpha = linalg::char_poly_coeffs(A);
  form.A_tilde = companion_from_coeffs(form.alpha);

  // Backward recursion; column index c = k-1.
  form.P.resize(n, n);
  form.P.col(n - 1) = b;
  for (Eigen::Index c = n - 2; c >= 0; --c) {
    const auto k = c + 1;
    form.P.col(c) = A * form.P.col(c + 1) + form.alpha[static_cast<std::size_t>(n - k - 1)] * b;
  }

  form.condition = linalg::condition_number(form.P);
  if (!(form.condition <= kMaxTransformCondition)) {
    throw Error(ErrorCode::kNotControllable,
                "pair (A, b) is not controllable: transform condition number " +
                    std::to_string(form.condition) + " exceeds 1e12");
  }
  form.P_inv = form.P.partialPivLu().inverse();
  form.similarity_residual = (A * form.P - form.P * form.A_tilde).norm();
  form.input_residual = (b - form.P.col(n - 1)).norm();
  return form;
}

}  // namespace trackctl
