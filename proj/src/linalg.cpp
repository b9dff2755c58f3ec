#include "trackctl/linalg.hpp"

#include <array>
#include <cmath>
#include <string>

#include "trackctl/error.hpp"

namespace trackctl::linalg {
namespace {

void require_square(const Matrix& A, const char* what) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorCode::kNonSquare,
                std::string(what) + " must be square, got " + std::to_string(A.rows()) +
                    "x" + std::to_string(A.cols()));
  }
}

// Pade coefficients b_0..b_m of the diagonal [m/m] approximant to exp.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// 1-norm bounds below which the [m/m] approximant is accurate to unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

// Builds U (odd part) and V (even part) for a low-degree approximant.
template <std::size_t K>
void pade_low(const Matrix& A, const std::array<double, K>& b, Matrix& U, Matrix& V) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  Matrix power = I;
  Matrix odd = Matrix::Zero(n, n);
  Matrix even = Matrix::Zero(n, n);
  for (std::size_t k = 0; k + 1 < K; k += 2) {
    even += b[k] * power;
    odd += b[k + 1] * power;
    power = power * A2;
  }
  U = A * odd;
  V = even;
}

void pade13(const Matrix& A, Matrix& U, Matrix& V) {
  const auto& b = kPade13;
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  const Matrix inner_u = A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2);
  U = A * (inner_u + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Matrix inner_v = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2);
  V = inner_v + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

double one_norm(const Matrix& A) {
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

Matrix mat_exp(const Matrix& A, double t) {
  require_square(A, "mat_exp argument");
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "mat_exp: time must be finite");
  }
  const Eigen::Index n = A.rows();
  if (n == 0) return Matrix(0, 0);
  const Matrix At = A * t;
  const double norm = one_norm(At);

  Matrix U, V;
  int squarings = 0;
  if (norm <= kTheta3) {
    pade_low(At, kPade3, U, V);
  } else if (norm <= kTheta5) {
    pade_low(At, kPade5, U, V);
  } else if (norm <= kTheta7) {
    pade_low(At, kPade7, U, V);
  } else if (norm <= kTheta9) {
    pade_low(At, kPade9, U, V);
  } else {
    if (norm > kTheta13) {
      squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    }
    pade13(At / std::ldexp(1.0, squarings), U, V);
  }
  // r = (V - U)^{-1} (V + U)
  Matrix result = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

std::vector<double> char_poly_coeffs(const Matrix& A) {
  require_square(A, "char_poly_coeffs argument");
  const Eigen::Index n = A.rows();
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return alpha;
  const Matrix I = Matrix::Identity(n, n);
  Matrix M = I;
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k > 1) M = A * M + alpha[static_cast<std::size_t>(k - 2)] * I;
    alpha[static_cast<std::size_t>(k - 1)] = -(A * M).trace() / static_cast<double>(k);
  }
  return alpha;
}

Matrix kalman_matrix(const Matrix& A, const Matrix& B) {
  require_square(A, "A");
  if (B.rows() != A.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "kalman_matrix: B has " + std::to_string(B.rows()) + " rows, A is " +
                    std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Matrix K(n, n * m);
  Matrix block = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    K.middleCols(k * m, m) = block;
    block = A * block;
  }
  return K;
}

SpectrumReport spectrum(const Matrix& M, double tol) {
  SpectrumReport report;
  if (M.size() == 0) return report;
  Eigen::BDCSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  report.singular_values.assign(s.data(), s.data() + s.size());
  const double sigma_max = s.size() > 0 ? s(0) : 0.0;
  report.threshold_used = tol * sigma_max;
  for (double v : report.singular_values) {
    if (v > report.threshold_used) ++report.rank_estimate;
  }
  return report;
}

SpectrumReport kalman_rank(const Matrix& A, const Matrix& B, double tol) {
  return spectrum(kalman_matrix(A, B), tol);
}

double condition_number(const Matrix& M) {
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

Matrix solve_linear(const Matrix& M, const Matrix& rhs) {
  require_square(M, "solve_linear matrix");
  if (rhs.rows() != M.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "solve_linear: rhs row count differs from matrix");
  }
  Eigen::PartialPivLU<Matrix> lu(M);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw Error(ErrorCode::kSingular, "solve_linear: matrix is numerically singular (rcond=" +
                                          std::to_string(rcond) + ")");
  }
  return lu.solve(rhs);
}

}  // namespace trackctl::linalg
