#pragma once

#include <string>
#include <vector>

#include "trackctl/linalg.hpp"
#include "trackctl/model.hpp"

namespace trackctl {

// Crank-Nicolson realization of the control-to-output map
//   (Lambda u)(t) = int_0^t E e^{A(t-s)} B u(s) ds
// on a uniform grid, with zero initial state:
//   x_{k+1} = Phi x_k + Psi (u_k + u_{k+1}),  y_k = E x_k.
//
// Inner products on both the control and output side are trapezoid-weighted,
// <a, b>_w = sum_k w_k a_k^T b_k. `adjoint` is the exact adjoint of `apply`
// under those products (a reverse sweep with the transposed step matrices),
// so <apply(u), psi>_w = <u, adjoint(psi)>_w holds to round-off.
class DiscreteOperator {
 public:
  DiscreteOperator(const LtiSystem& sys, const Grid& grid);

  const Grid& grid() const { return grid_; }
  int input_dim() const { return static_cast<int>(B_.cols()); }
  int output_dim() const { return static_cast<int>(E_.rows()); }

  /// Output samples p x (N+1).
  Matrix apply(const Matrix& u) const;
  /// Plain (unweighted) matrix transpose of apply: m x (N+1).
  Matrix transpose(const Matrix& z) const;
  /// Weighted adjoint: W^{-1} transpose(W psi).
  Matrix adjoint(const Matrix& psi) const;
  /// apply(adjoint(psi)).
  Matrix gramian(const Matrix& psi) const;

  /// Weighted inner product of two sample matrices on this grid.
  double inner(const Matrix& a, const Matrix& b) const;

  const Matrix& step_matrix() const { return Phi_; }
  const Matrix& input_matrix() const { return Psi_; }

 private:
  Grid grid_;
  Matrix Phi_;
  Matrix Psi_;
  Matrix E_;
  Matrix B_;
  Vector weights_;
};

SampledSignal lambda_apply(const LtiSystem& sys, const SampledSignal& u);
SampledSignal lambda_adjoint_apply(const LtiSystem& sys, const SampledSignal& psi);
SampledSignal gramian_apply(const LtiSystem& sys, const SampledSignal& psi);

// Backward Crank-Nicolson solve of -phi' = A^T phi + E^T g, phi(T) = 0.
// This discretizes the continuous adjoint system directly; it agrees with
// lambda_adjoint_apply to O(dt^2) but is not its exact transpose.
struct AdjointRun {
  SampledSignal source;       // g, dimension p
  Matrix adjoint_state;       // phi, n x (N+1), last column exactly zero
  SampledSignal observation;  // B^T phi, dimension m
};

AdjointRun adjoint_run(const LtiSystem& sys, const SampledSignal& g);

/// Largest dense matrix (entry count) the assembly routines will build.
inline constexpr double kMaxDenseEntries = 4e6;

/// Column j = apply(unit impulse at node j); p(N+1) x m(N+1), node-major
/// (row k*p + i is output i at node k).
Matrix assemble_lambda_matrix(const LtiSystem& sys, const Grid& grid);

/// Gramian in the orthonormal basis of the weighted space:
/// W^{1/2} L W^{-1} L^T W^{1/2}. Symmetric PSD; G psi = W^{-1/2} G_dense W^{1/2} psi.
Matrix gramian_matrix(const LtiSystem& sys, const Grid& grid);

/// Matrix used by the spectrum diagnostics. Controls are taken as cell
/// averages (u_k + u_{k+1})/2 with the L2 norm sum dt |.|^2, outputs are
/// measured through the discrete H^1_0 seminorm via increments
/// (y_k - y_{k-1})/dt. Size pN x mN. For the pure integrator it is the
/// identity, so any decay of its smallest singular value under refinement
/// reflects smoothing by the plant, not by the discretization.
Matrix energy_lambda_matrix(const LtiSystem& sys, const Grid& grid);

struct SpectrumSample {
  int steps = 0;
  linalg::SpectrumReport report;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  // log(sigma_min ratio) / log(dt ratio) against the previous grid; 0 for the first.
  double decay_exponent = 0.0;
};

std::vector<SpectrumSample> observability_spectrum(const LtiSystem& sys, double horizon,
                                                   const std::vector<int>& grid_steps);

struct UniqueContinuationReport {
  double sigma_min_rel = 0.0;
  bool holds = false;
  std::string verdict;
};

/// Injectivity of the discrete adjoint map g -> B^T phi, judged by
/// sigma_min/sigma_max > 1e-10 (outputs with more unknowns than controls
/// can never pass).
UniqueContinuationReport unique_continuation_test(const LtiSystem& sys, const Grid& grid);

struct MomentResult {
  SampledSignal control;
  double compatibility_deviation = 0.0;
};

/// u = f_1'/c_1 - lambda_1 f_1/c_1 for decoupled modes f_k' = lambda_k f_k + c_k u,
/// plus the largest disagreement of the same formula over the other modes.
MomentResult moment_control(const std::vector<double>& lambdas, const std::vector<double>& c,
                            const std::vector<TargetSignal>& components, const Grid& grid);

}  // namespace trackctl
