#pragma once

#include <vector>

#include "trackctl/brunovsky.hpp"
#include "trackctl/model.hpp"

namespace trackctl {

/// Default relative threshold below which an output coefficient counts as zero.
inline constexpr double kEtaRelTol = 1e-10;

struct CascadeState {
  std::vector<double> eta;  // eta_i = <E, p_i>
  std::vector<double> alpha;
  int k_star = 0;           // 1-based
  int n = 0;
  // y1_derivs(j, k) = j-th derivative of y_1 at node k, j = 0..n.
  Matrix y1_derivs;

  int required_target_order() const { return n - k_star + 1; }
};

std::vector<double> output_coefficients(const RowVector& E, const BrunovskyForm& form);

/// Largest 1-based index k with |eta_k| > rel_tol * max|eta|. Throws
/// AllZeroOutput when every coefficient vanishes.
int critical_index(const std::vector<double>& eta, double rel_tol = kEtaRelTol);

/// Prepares the cascade for a given form and output row.
CascadeState make_cascade(const RowVector& E, const BrunovskyForm& form,
                          double rel_tol = kEtaRelTol);

/// Fills rows 0..k*-1 of y1_derivs. For k* >= 2 the order-(k*-1) linear ODE
///   eta_{k*} y^{(k*-1)} + sum_{j<k*} eta_j y^{(j-1)} = g,  zero initial data,
/// is integrated with fixed-step RK4 on the grid; row k*-1 is then the
/// algebraic relation itself. For k* = 1 only the algebraic row is filled.
void cascade_solve(CascadeState& state, const TargetSignal& g, const Grid& grid);

/// Fills rows k*..n by differentiating the algebraic relation m times
/// (m = 1..n-k*+1), using g^{(m)} from the target.
void derivative_lift(CascadeState& state, const TargetSignal& g, const Grid& grid);

struct TrackingSynthesis {
  SampledSignal control;
  CascadeState cascade;
  BrunovskyForm form;
  TargetSignal shifted_target;
  // ||y(0)|| of the synthesized Brunovsky state. Exact tracking from x0 needs
  // this to vanish: g^{(m)}(0) = 0 for m <= n - k*. A nonzero value means the
  // formula's control reproduces g only up to a free-response transient.
  double initial_mismatch = 0.0;
};

/// Exact tracking control for scalar input and scalar output:
/// u = y_1^{(n)} + sum_j a_{n+1-j} y_1^{(j-1)}.
TrackingSynthesis synthesize_tracking_control(const LtiSystem& sys, const TargetSignal& f,
                                              const Grid& grid);

/// RK4 on grid.refined(refine); the control is interpolated with the cubic
/// Lagrange polynomial through the four nearest nodes. Returns the coarse nodes.
Trajectory simulate(const LtiSystem& sys, const SampledSignal& u, int refine = 4);

struct TrackingError {
  double mse = 0.0;      // node mean of |Ex - f|^2
  double max_abs = 0.0;
};

TrackingError tracking_error(const Trajectory& traj, const TargetSignal& f);
TrackingError tracking_error(const Trajectory& traj, const std::vector<TargetSignal>& f);

/// Control value at time t from node samples (cubic Lagrange, 4 nearest nodes).
Vector interpolate_control(const SampledSignal& u, double t);

}  // namespace trackctl
