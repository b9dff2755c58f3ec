#include "trackctl/hum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "trackctl/error.hpp"
#include "trackctl/operators.hpp"
#include "trackctl/tracker.hpp"

namespace trackctl {
namespace {

void validate(const HumProblem& p) {
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be finite and >= 0");
  }
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be finite and > 0");
  }
  if (!(p.control_weight > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "control weight must be > 0");
  }
  if (static_cast<int>(p.targets.size()) != p.sys.p()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one target per output row");
  }
}

Matrix sample_targets(const std::vector<TargetSignal>& f, const Grid& grid) {
  Matrix F(static_cast<Eigen::Index>(f.size()), grid.node_count());
  for (std::size_t i = 0; i < f.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = sample(f[i], grid).transpose();
  return F;
}

double dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

struct Context {
  DiscreteOperator op;
  Vector w;
  Trajectory free;
  Matrix target;

  explicit Context(const HumProblem& p)
      : op(p.sys, p.grid),
        w(p.grid.trapezoid_weights()),
        free(free_response(p.sys, p.grid)),
        target(sample_targets(p.targets, p.grid)) {}

  Matrix normal(const HumProblem& p, const Matrix& u) const {
    Matrix out = op.transpose(op.apply(u) * w.asDiagonal()) * p.alpha;
    out += (p.beta * p.control_weight) * (u * w.asDiagonal());
    return out;
  }

  Matrix rhs(const HumProblem& p) const {
    return op.transpose((target - free.outputs) * w.asDiagonal()) * p.alpha;
  }

  double objective(const HumProblem& p, const Matrix& u) const {
    const Matrix r = op.apply(u) + free.outputs - target;
    return 0.5 * p.beta * p.control_weight * op.inner(u, u) + 0.5 * p.alpha * op.inner(r, r);
  }
};

// Zero-initial-state Crank-Nicolson states driven by u.
Matrix driven_states(const LtiSystem& sys, const Grid& grid, const Matrix& u) {
  const LtiSystem full(sys.A, sys.B, Matrix::Identity(sys.n(), sys.n()));
  return DiscreteOperator(full, grid).apply(u);
}

}  // namespace

HumProblem::HumProblem(LtiSystem s, TargetSignal f, Grid g, double alpha_, double beta_)
    : HumProblem(std::move(s), std::vector<TargetSignal>{std::move(f)}, g, alpha_, beta_) {}

HumProblem::HumProblem(LtiSystem s, std::vector<TargetSignal> f, Grid g, double alpha_, double beta_)
    : sys(std::move(s)), targets(std::move(f)), grid(g), alpha(alpha_), beta(beta_) {}

Matrix hum_normal_apply(const HumProblem& problem, const Matrix& u) {
  validate(problem);
  return Context(problem).normal(problem, u);
}

Matrix hum_rhs(const HumProblem& problem) {
  validate(problem);
  return Context(problem).rhs(problem);
}

double hum_objective(const HumProblem& problem, const Matrix& u) {
  validate(problem);
  return Context(problem).objective(problem, u);
}

HumSolution hum_solve(const HumProblem& problem) {
  validate(problem);
  const Context ctx(problem);
  const Matrix b = ctx.rhs(problem);
  const double b_norm = b.norm();

  Matrix u = Matrix::Zero(problem.sys.m(), problem.grid.node_count());
  int iters = 0;
  double rel_residual = 0.0;
  bool converged = true;
  if (b_norm > 0.0) {
    Matrix r = b;
    Matrix d = r;
    double rr = dot(r, r);
    const double stop = problem.cg_tol * b_norm;
    converged = false;
    while (iters < problem.cg_max_iters) {
      if (std::sqrt(rr) <= stop) {
        converged = true;
        break;
      }
      const Matrix Hd = ctx.normal(problem, d);
      const double step = rr / dot(d, Hd);
      u += step * d;
      r -= step * Hd;
      const double rr_next = dot(r, r);
      d = r + (rr_next / rr) * d;
      rr = rr_next;
      ++iters;
    }
    if (!converged && std::sqrt(rr) <= stop) converged = true;
    rel_residual = (ctx.normal(problem, u) - b).norm() / b_norm;
  }

  Matrix states = ctx.free.states + driven_states(problem.sys, problem.grid, u);
  Matrix outputs = problem.sys.E * states;
  Trajectory traj{problem.grid, std::move(states), std::move(outputs)};
  const TrackingError err = tracking_error(traj, problem.targets);

  HumSolution sol{SampledSignal(problem.grid, u), std::move(traj)};
  sol.mse = err.mse;
  sol.max_abs = err.max_abs;
  sol.objective = ctx.objective(problem, u);
  sol.control_norm = std::sqrt(problem.control_weight * ctx.op.inner(u, u));
  sol.cg_iters = iters;
  sol.residual = rel_residual;
  sol.converged = converged;
  return sol;
}

HumSolution hum_solve_distributed(const ChainSpec& spec, const TargetSignal& f, const Grid& grid,
                                  double alpha, double beta) {
  HumProblem problem(heat_distributed_system(spec), f, grid, alpha, beta);
  problem.control_weight = spec.h();
  return hum_solve(problem);
}

std::vector<SweepRow> alpha_sweep(const HumProblem& problem, const std::vector<double>& alphas,
                                  unsigned threads) {
  std::vector<SweepRow> rows(alphas.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, alphas.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (std::size_t i = next++; i < alphas.size(); i = next++) {
      try {
        HumProblem p = problem;
        p.alpha = alphas[i];
        const HumSolution sol = hum_solve(p);
        rows[i] = SweepRow{alphas[i], sol.mse, sol.control_norm, sol.cg_iters, sol.converged};
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace trackctl
