#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <utility>
#include <vector>

#include "trackctl/model.hpp"

namespace trackctl {

// Uniform 1-D chain on [0, L]: M interior nodes x_j = j h, h = L / (M + 1).
struct ChainSpec {
  double length = 1.0;
  int interior = 1;

  ChainSpec(double length_, int interior_);
  double h() const { return length / (interior + 1); }
};

/// z' = (1/h^2) tridiag(1,-2,1) z + (1/h^2) e_1 u, output -(1/h) z_M
/// (the flux (z_{M+1} - z_M)/h with z_{M+1} = 0).
LtiSystem heat_boundary_system(const ChainSpec& spec);

/// Same Laplacian, one input per interior node (B = I), same flux output.
LtiSystem heat_distributed_system(const ChainSpec& spec);

/// First-order form of w'' = (1/h^2) tridiag(1,-2,1) w + (1/h^2) e_1 u with
/// state (w, w'); output -(1/h) w_M.
LtiSystem wave_boundary_system(const ChainSpec& spec);

// Exact integer combination sum_{(d, e)} c * h^e * f^{(d)}, keyed by
// (derivative order d, power of h e).
using Coefficient = boost::multiprecision::cpp_int;
using CoefficientTable = std::map<std::pair<int, int>, Coefficient>;

/// Levels j = 0..M+1 of the backward cascade starting at w_{M+1} = 0,
/// w_M = -h f:
///   wave: w_{j-1} = h^2 w_j'' + 2 w_j - w_{j+1}
///   heat: z_{j-1} = h^2 z_j'  + 2 z_j - z_{j+1}
std::vector<CoefficientTable> wave_cascade_tables(int interior);
std::vector<CoefficientTable> heat_cascade_tables(int interior);

/// Highest derivative order appearing in a table (-1 if empty).
int max_derivative(const CoefficientTable& table);

/// Evaluates a table for given h and derivative values f^{(0..)}.
double evaluate(const CoefficientTable& table, double h, const std::vector<double>& derivs);

struct CascadeControl {
  SampledSignal u;               // u = w_0 (or z_0)
  Matrix states;                 // row j-1 holds w_j (or z_j), j = 1..M
  std::vector<CoefficientTable> tables;
  int max_derivative_used = 0;
};

/// Explicit boundary control making (w_{M+1} - w_M)/h = f. Needs 2M exact
/// derivatives of f, with f^{(0..2M-1)}(0) = 0 (zero initial chain data).
CascadeControl wave_cascade_control(const ChainSpec& spec, const TargetSignal& f, const Grid& grid);

/// Heat analogue: needs M exact derivatives and f^{(0..M-1)}(0) = 0.
CascadeControl heat_cascade_control(const ChainSpec& spec, const TargetSignal& f, const Grid& grid);

}  // namespace trackctl
