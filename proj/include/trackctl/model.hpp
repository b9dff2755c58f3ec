#pragma once

#include "trackctl/linalg.hpp"
#include "trackctl/target.hpp"

namespace trackctl {

// Uniform time grid t_k = k T / N, k = 0..N.
class Grid {
 public:
  Grid(double horizon, int steps);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  int node_count() const { return steps_ + 1; }
  double dt() const { return horizon_ / steps_; }
  double node(int k) const { return horizon_ * k / steps_; }
  Vector nodes() const;
  /// Trapezoid weights: dt/2 at both ends, dt inside.
  Vector trapezoid_weights() const;

  /// Same horizon, `factor` times more steps.
  Grid refined(int factor) const { return Grid(horizon_, steps_ * factor); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double horizon_;
  int steps_;
};

// x' = Ax + Bu, output Ex, x(0) = x0.
struct LtiSystem {
  Matrix A;
  Matrix B;
  Matrix E;
  Vector x0;

  LtiSystem(Matrix A, Matrix B, Matrix E, Vector x0);
  /// x0 = 0.
  LtiSystem(Matrix A, Matrix B, Matrix E);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(E.rows()); }

  LtiSystem with_initial_state(Vector state) const { return {A, B, E, std::move(state)}; }
  LtiSystem with_output(Matrix output) const { return {A, B, std::move(output), x0}; }
};

// Samples of a d-dimensional signal: column k holds the value at node k.
struct SampledSignal {
  Grid grid;
  Matrix values;

  SampledSignal(Grid g, Matrix v);
  static SampledSignal zeros(const Grid& g, int dim);

  int dim() const { return static_cast<int>(values.rows()); }
};

struct Trajectory {
  Grid grid;
  Matrix states;   // n x (N+1)
  Matrix outputs;  // p x (N+1), column k = E * states.col(k)
};

/// Samples a scalar target at every grid node.
Vector sample(const TargetSignal& f, const Grid& grid, int order = 0);

/// Uncontrolled motion e^{At} x0 at the grid nodes.
Trajectory free_response(const LtiSystem& sys, const Grid& grid);

/// d^k/dt^k [E e^{At} x0] = E A^k e^{At} x0.
Vector free_output_derivative(const LtiSystem& sys, int k, double t);

/// Reduces tracking f from x0 to tracking g from the zero state:
/// g^{(k)}(t) = f^{(k)}(t) - E A^k e^{At} x0. Scalar outputs only.
/// Throws CompatibilityViolation unless f(0) = E x0.
TargetSignal shift_target(const LtiSystem& sys, const TargetSignal& f);

}  // namespace trackctl
