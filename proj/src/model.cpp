#include "trackctl/model.hpp"

#include <cmath>
#include <string>

#include "trackctl/error.hpp"

namespace trackctl {
namespace {

void require_finite(const Matrix& M, const char* name) {
  if (!M.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " has non-finite entries");
  }
}

std::string shape(const Matrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

}  // namespace

Grid::Grid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::kInvalidArgument, "grid horizon T must be positive and finite");
  }
  if (steps < 2) throw Error(ErrorCode::kInvalidArgument, "grid needs N >= 2 steps");
}

Vector Grid::nodes() const {
  Vector t(node_count());
  for (int k = 0; k <= steps_; ++k) t(k) = node(k);
  return t;
}

Vector Grid::trapezoid_weights() const {
  Vector w = Vector::Constant(node_count(), dt());
  w(0) *= 0.5;
  w(steps_) *= 0.5;
  return w;
}

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix e, Vector initial)
    : A(std::move(a)), B(std::move(b)), E(std::move(e)), x0(std::move(initial)) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorCode::kNonSquare, "A must be square, got " + shape(A));
  }
  const auto n = A.rows();
  if (n < 1) throw Error(ErrorCode::kDimensionMismatch, "state dimension must be >= 1");
  if (B.rows() != n || B.cols() < 1 || B.cols() > n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "B must be n x m with 1 <= m <= n, got " + shape(B) + " for n=" + std::to_string(n));
  }
  if (E.cols() != n || E.rows() < 1 || E.rows() > n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "E must be p x n with 1 <= p <= n, got " + shape(E) + " for n=" + std::to_string(n));
  }
  if (x0.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "x0 must have length " + std::to_string(n));
  }
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(E, "E");
  require_finite(x0, "x0");
}

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix e)
    : LtiSystem(a, b, e, Vector::Zero(a.rows())) {}

SampledSignal::SampledSignal(Grid g, Matrix v) : grid(g), values(std::move(v)) {
  if (values.cols() != grid.node_count()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "signal has " + std::to_string(values.cols()) + " samples, grid has " +
                    std::to_string(grid.node_count()) + " nodes");
  }
  require_finite(values, "signal");
}

SampledSignal SampledSignal::zeros(const Grid& g, int dim) {
  return SampledSignal(g, Matrix::Zero(dim, g.node_count()));
}

Vector sample(const TargetSignal& f, const Grid& grid, int order) {
  Vector v(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) v(k) = f.eval(order, grid.node(k));
  return v;
}

Trajectory free_response(const LtiSystem& sys, const Grid& grid) {
  const int count = grid.node_count();
  Matrix states = Matrix::Zero(sys.n(), count);
  if (!sys.x0.isZero(0.0)) {
    const Matrix step = linalg::mat_exp(sys.A, grid.dt());
    states.col(0) = sys.x0;
    for (int k = 1; k < count; ++k) states.col(k) = step * states.col(k - 1);
  }
  Matrix outputs = sys.E * states;
  return Trajectory{grid, std::move(states), std::move(outputs)};
}

Vector free_output_derivative(const LtiSystem& sys, int k, double t) {
  Vector x = linalg::mat_exp(sys.A, t) * sys.x0;
  for (int i = 0; i < k; ++i) x = sys.A * x;
  return sys.E * x;
}

TargetSignal shift_target(const LtiSystem& sys, const TargetSignal& f) {
  if (sys.p() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "shift_target handles scalar outputs (p = 1) only");
  }
  const double f0 = f.eval(0, 0.0);
  const double ex0 = sys.E.row(0).dot(sys.x0);
  if (std::abs(f0 - ex0) > 1e-9 * (1.0 + std::abs(f0))) {
    throw Error(ErrorCode::kCompatibilityViolation,
                "f(0) = " + std::to_string(f0) + " differs from E x0 = " + std::to_string(ex0));
  }
  if (sys.x0.isZero(0.0)) return f;
  return TargetSignal::minus_free_output(f, sys.E.row(0), sys.A, sys.x0);
}

}  // namespace trackctl
