#include "trackctl/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trackctl/error.hpp"

namespace trackctl {
namespace {

void require_order(const TargetSignal& g, int order) {
  if (g.max_exact_derivative() < order) {
    throw Error(ErrorCode::kInsufficientRegularity,
                "tracking needs " + std::to_string(order) +
                    " exact derivatives of the target, it provides " +
                    std::to_string(g.max_exact_derivative()));
  }
}

// eta_{k*}^{-1} (g - sum_{j<k*} eta_j z_{j-1})
double top_derivative(const CascadeState& s, double g, const double* lower) {
  double acc = g;
  for (int j = 1; j < s.k_star; ++j) acc -= s.eta[static_cast<std::size_t>(j - 1)] * lower[j - 1];
  return acc / s.eta[static_cast<std::size_t>(s.k_star - 1)];
}

}  // namespace

std::vector<double> output_coefficients(const RowVector& E, const BrunovskyForm& form) {
  if (E.size() != form.P.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "output row length differs from state dimension");
  }
  std::vector<double> eta(static_cast<std::size_t>(form.P.cols()));
  for (Eigen::Index i = 0; i < form.P.cols(); ++i) eta[static_cast<std::size_t>(i)] = E.dot(form.P.col(i));
  return eta;
}

int critical_index(const std::vector<double>& eta, double rel_tol) {
  if (eta.empty()) throw Error(ErrorCode::kInvalidArgument, "critical_index: empty coefficient list");
  double largest = 0.0;
  for (double v : eta) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) {
    throw Error(ErrorCode::kAllZeroOutput,
                "output annihilates every transform column; only f = 0 is trackable");
  }
  for (int k = static_cast<int>(eta.size()); k >= 1; --k) {
    if (std::abs(eta[static_cast<std::size_t>(k - 1)]) > rel_tol * largest) return k;
  }
  throw Error(ErrorCode::kAllZeroOutput, "no output coefficient above threshold");
}

CascadeState make_cascade(const RowVector& E, const BrunovskyForm& form, double rel_tol) {
  CascadeState s;
  s.eta = output_coefficients(E, form);
  s.alpha = form.alpha;
  s.k_star = critical_index(s.eta, rel_tol);
  s.n = static_cast<int>(form.P.cols());
  return s;
}

void cascade_solve(CascadeState& s, const TargetSignal& g, const Grid& grid) {
  require_order(g, s.required_target_order());
  const int count = grid.node_count();
  s.y1_derivs = Matrix::Zero(s.n + 1, count);
  const int order = s.k_star - 1;

  if (order == 0) {
    const double eta_top = s.eta[0];
    for (int k = 0; k < count; ++k) s.y1_derivs(0, k) = g.eval(0, grid.node(k)) / eta_top;
    return;
  }

  // z = (y, y', ..., y^{(order-1)}), z' = F(t, z).
  auto rhs = [&](double t, const Vector& z) {
    Vector dz(order);
    for (int i = 0; i + 1 < order; ++i) dz(i) = z(i + 1);
    dz(order - 1) = top_derivative(s, g.eval(0, t), z.data());
    return dz;
  };

  Vector z = Vector::Zero(order);
  const double h = grid.dt();
  s.y1_derivs.block(0, 0, order, 1) = z;
  for (int k = 0; k + 1 < count; ++k) {
    const double t = grid.node(k);
    const Vector k1 = rhs(t, z);
    const Vector k2 = rhs(t + 0.5 * h, z + 0.5 * h * k1);
    const Vector k3 = rhs(t + 0.5 * h, z + 0.5 * h * k2);
    const Vector k4 = rhs(t + h, z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s.y1_derivs.block(0, k + 1, order, 1) = z;
  }
  for (int k = 0; k < count; ++k) {
    const Vector lower = s.y1_derivs.block(0, k, order, 1);
    s.y1_derivs(order, k) = top_derivative(s, g.eval(0, grid.node(k)), lower.data());
  }
}

void derivative_lift(CascadeState& s, const TargetSignal& g, const Grid& grid) {
  const int steps = s.required_target_order();
  require_order(g, steps);
  if (s.y1_derivs.cols() != grid.node_count()) {
    throw Error(ErrorCode::kInvalidArgument, "derivative_lift called before cascade_solve");
  }
  const int base = s.k_star - 1;
  for (int k = 0; k < grid.node_count(); ++k) {
    const auto gd = g.derivatives(grid.node(k), steps);
    for (int m = 1; m <= steps; ++m) {
      double acc = gd[static_cast<std::size_t>(m)];
      for (int j = 1; j < s.k_star; ++j) {
        acc -= s.eta[static_cast<std::size_t>(j - 1)] * s.y1_derivs(j - 1 + m, k);
      }
      s.y1_derivs(base + m, k) = acc / s.eta[static_cast<std::size_t>(s.k_star - 1)];
    }
  }
}

TrackingSynthesis synthesize_tracking_control(const LtiSystem& sys, const TargetSignal& f,
                                              const Grid& grid) {
  if (sys.m() != 1 || sys.p() != 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "exact tracking synthesis needs scalar input and scalar output (m = p = 1)");
  }
  TargetSignal g = shift_target(sys, f);
  BrunovskyForm form = brunovsky_transform(sys.A, sys.B.col(0));
  CascadeState cascade = make_cascade(sys.E.row(0), form);
  require_order(g, cascade.required_target_order());
  cascade_solve(cascade, g, grid);
  derivative_lift(cascade, g, grid);

  const int n = cascade.n;
  Matrix u(1, grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) {
    double v = cascade.y1_derivs(n, k);
    for (int j = 1; j <= n; ++j) v += cascade.alpha[static_cast<std::size_t>(n - j)] * cascade.y1_derivs(j - 1, k);
    u(0, k) = v;
  }
  const double mismatch = cascade.y1_derivs.block(0, 0, n, 1).norm();
  return TrackingSynthesis{SampledSignal(grid, std::move(u)), std::move(cascade), std::move(form),
                           std::move(g), mismatch};
}

Vector interpolate_control(const SampledSignal& u, double t) {
  const Grid& grid = u.grid;
  const int last = grid.steps();
  const int width = std::min(4, grid.node_count());
  const double pos = t / grid.dt();
  int first = static_cast<int>(std::floor(pos)) - (width / 2 - 1);
  first = std::clamp(first, 0, last + 1 - width);
  Vector value = Vector::Zero(u.dim());
  for (int i = 0; i < width; ++i) {
    double weight = 1.0;
    for (int j = 0; j < width; ++j) {
      if (j != i) weight *= (pos - (first + j)) / static_cast<double>(i - j);
    }
    value += weight * u.values.col(first + i);
  }
  return value;
}

Trajectory simulate(const LtiSystem& sys, const SampledSignal& u, int refine) {
  if (refine < 1) throw Error(ErrorCode::kInvalidArgument, "refine factor must be >= 1");
  if (u.dim() != sys.m()) {
    throw Error(ErrorCode::kDimensionMismatch, "control dimension differs from B column count");
  }
  const Grid& grid = u.grid;
  const Grid fine = grid.refined(refine);
  const double h = fine.dt();
  auto rhs = [&](double t, const Vector& x) -> Vector {
    return sys.A * x + sys.B * interpolate_control(u, t);
  };

  Matrix states(sys.n(), grid.node_count());
  Vector x = sys.x0;
  states.col(0) = x;
  for (int k = 0; k < fine.steps(); ++k) {
    const double t = fine.node(k);
    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((k + 1) % refine == 0) states.col((k + 1) / refine) = x;
  }
  Matrix outputs = sys.E * states;
  return Trajectory{grid, std::move(states), std::move(outputs)};
}

TrackingError tracking_error(const Trajectory& traj, const std::vector<TargetSignal>& f) {
  if (static_cast<Eigen::Index>(f.size()) != traj.outputs.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "target count differs from output dimension");
  }
  TrackingError err;
  const int count = traj.grid.node_count();
  double sum = 0.0;
  for (int k = 0; k < count; ++k) {
    double sq = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = traj.outputs(static_cast<Eigen::Index>(i), k) - f[i].eval(0, traj.grid.node(k));
      sq += d * d;
      err.max_abs = std::max(err.max_abs, std::abs(d));
    }
    sum += sq;
  }
  err.mse = sum / count;
  return err;
}

TrackingError tracking_error(const Trajectory& traj, const TargetSignal& f) {
  return tracking_error(traj, std::vector<TargetSignal>{f});
}

}  // namespace trackctl
