#pragma once

#include <vector>

#include "trackctl/model.hpp"
#include "trackctl/pde.hpp"

namespace trackctl {

// Penalized tracking problem
//   J(u) = (beta * control_weight / 2) <u, u>_w + (alpha / 2) <Ex - f, Ex - f>_w
// with x' = Ax + Bu, x(0) = x0 and trapezoid-weighted products on the grid.
// control_weight carries a spatial cell size when u is a sampled field.
struct HumProblem {
  LtiSystem sys;
  std::vector<TargetSignal> targets;  // one per output row
  Grid grid;
  double alpha = 1e4;
  double beta = 1.0;
  double control_weight = 1.0;
  double cg_tol = 1e-10;
  int cg_max_iters = 5000;

  HumProblem(LtiSystem s, TargetSignal f, Grid g, double alpha_, double beta_ = 1.0);
  HumProblem(LtiSystem s, std::vector<TargetSignal> f, Grid g, double alpha_, double beta_ = 1.0);
};

struct HumSolution {
  SampledSignal u;
  Trajectory traj;
  double mse = 0.0;
  double max_abs = 0.0;
  double objective = 0.0;
  double control_norm = 0.0;  // sqrt(control_weight <u, u>_w)
  int cg_iters = 0;
  double residual = 0.0;      // final normal-equation residual / ||rhs||
  bool converged = true;
};

/// Conjugate gradients on (beta cw W + alpha L^T W L) u = alpha L^T W (f - E x_free),
/// L the Crank-Nicolson control-to-output map. Does not throw on
/// non-convergence; check `converged`.
HumSolution hum_solve(const HumProblem& problem);

/// Distributed control of the semi-discrete heat equation (one input per
/// interior node, control norm weighted by h), tracking the outward flux at
/// x = L from the zero state.
HumSolution hum_solve_distributed(const ChainSpec& spec, const TargetSignal& f, const Grid& grid,
                                  double alpha, double beta);

/// Normal-equation operator and right-hand side, exposed for verification.
Matrix hum_normal_apply(const HumProblem& problem, const Matrix& u);
Matrix hum_rhs(const HumProblem& problem);
/// Discrete objective J_h(u).
double hum_objective(const HumProblem& problem, const Matrix& u);

struct SweepRow {
  double alpha = 0.0;
  double mse = 0.0;
  double control_norm = 0.0;
  int cg_iters = 0;
  bool converged = true;
};

/// Solves the problem for each alpha. Independent solves run on up to
/// `threads` workers (0 = hardware concurrency); row order follows `alphas`.
std::vector<SweepRow> alpha_sweep(const HumProblem& problem, const std::vector<double>& alphas,
                                  unsigned threads = 0);

}  // namespace trackctl
