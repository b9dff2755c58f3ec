#include "trackctl/pde.hpp"

#include <cmath>
#include <string>

#include "trackctl/error.hpp"

namespace trackctl {
namespace {

Matrix laplacian(const ChainSpec& spec) {
  const int M = spec.interior;
  const double s = 1.0 / (spec.h() * spec.h());
  Matrix A = Matrix::Zero(M, M);
  for (int j = 0; j < M; ++j) {
    A(j, j) = -2.0 * s;
    if (j > 0) A(j, j - 1) = s;
    if (j + 1 < M) A(j, j + 1) = s;
  }
  return A;
}

Matrix flux_output(const ChainSpec& spec, int state_dim) {
  Matrix E = Matrix::Zero(1, state_dim);
  E(0, spec.interior - 1) = -1.0 / spec.h();
  return E;
}

void add_scaled(CoefficientTable& out, const CoefficientTable& in, int scale) {
  for (const auto& [key, c] : in) {
    out[key] += c * scale;
    if (out[key] == 0) out.erase(key);
  }
}

// Backward cascade; `derivative_step` is 2 for the wave chain, 1 for heat.
std::vector<CoefficientTable> cascade_tables(int interior, int derivative_step) {
  if (interior < 1) throw Error(ErrorCode::kInvalidArgument, "chain needs M >= 1");
  std::vector<CoefficientTable> level(static_cast<std::size_t>(interior) + 2);
  level[static_cast<std::size_t>(interior)][{0, 1}] = -1;
  for (int j = interior; j >= 1; --j) {
    const auto& cur = level[static_cast<std::size_t>(j)];
    CoefficientTable next;
    for (const auto& [key, c] : cur) next[{key.first + derivative_step, key.second + 2}] += c;
    add_scaled(next, cur, 2);
    add_scaled(next, level[static_cast<std::size_t>(j + 1)], -1);
    level[static_cast<std::size_t>(j - 1)] = std::move(next);
  }
  return level;
}

CascadeControl cascade_control(const ChainSpec& spec, const TargetSignal& f, const Grid& grid,
                               int derivative_step, const char* name) {
  const int M = spec.interior;
  const int needed = derivative_step * M;
  if (f.max_exact_derivative() < needed) {
    throw Error(ErrorCode::kInsufficientRegularity,
                std::string(name) + " cascade with M=" + std::to_string(M) + " needs " +
                    std::to_string(needed) + " exact target derivatives, target provides " +
                    std::to_string(f.max_exact_derivative()));
  }
  const auto at_zero = f.derivatives(0.0, needed);
  for (int k = 0; k < needed; ++k) {
    if (std::abs(at_zero[static_cast<std::size_t>(k)]) > 1e-9) {
      throw Error(ErrorCode::kCompatibilityViolation,
                  std::string(name) + " cascade starts from rest: target derivative of order " +
                      std::to_string(k) + " must vanish at t=0, got " +
                      std::to_string(at_zero[static_cast<std::size_t>(k)]));
    }
  }

  CascadeControl out{SampledSignal::zeros(grid, 1), Matrix::Zero(M, grid.node_count()),
                     cascade_tables(M, derivative_step), 0};
  out.max_derivative_used = max_derivative(out.tables[0]);
  const double h = spec.h();
  for (int k = 0; k < grid.node_count(); ++k) {
    const auto d = f.derivatives(grid.node(k), needed);
    out.u.values(0, k) = evaluate(out.tables[0], h, d);
    for (int j = 1; j <= M; ++j) out.states(j - 1, k) = evaluate(out.tables[static_cast<std::size_t>(j)], h, d);
  }
  return out;
}

}  // namespace

ChainSpec::ChainSpec(double length_, int interior_) : length(length_), interior(interior_) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorCode::kInvalidArgument, "chain length must be positive");
  }
  if (interior < 1) throw Error(ErrorCode::kInvalidArgument, "chain needs M >= 1 interior nodes");
}

LtiSystem heat_boundary_system(const ChainSpec& spec) {
  const int M = spec.interior;
  Matrix B = Matrix::Zero(M, 1);
  B(0, 0) = 1.0 / (spec.h() * spec.h());
  return LtiSystem(laplacian(spec), std::move(B), flux_output(spec, M));
}

LtiSystem heat_distributed_system(const ChainSpec& spec) {
  const int M = spec.interior;
  return LtiSystem(laplacian(spec), Matrix::Identity(M, M), flux_output(spec, M));
}

LtiSystem wave_boundary_system(const ChainSpec& spec) {
  const int M = spec.interior;
  Matrix A = Matrix::Zero(2 * M, 2 * M);
  A.topRightCorner(M, M) = Matrix::Identity(M, M);
  A.bottomLeftCorner(M, M) = laplacian(spec);
  Matrix B = Matrix::Zero(2 * M, 1);
  B(M, 0) = 1.0 / (spec.h() * spec.h());
  return LtiSystem(std::move(A), std::move(B), flux_output(spec, 2 * M));
}

std::vector<CoefficientTable> wave_cascade_tables(int interior) { return cascade_tables(interior, 2); }
std::vector<CoefficientTable> heat_cascade_tables(int interior) { return cascade_tables(interior, 1); }

int max_derivative(const CoefficientTable& table) {
  int top = -1;
  for (const auto& [key, c] : table) top = std::max(top, key.first);
  return top;
}

double evaluate(const CoefficientTable& table, double h, const std::vector<double>& derivs) {
  double sum = 0.0;
  for (const auto& [key, c] : table) {
    sum += static_cast<double>(c) * std::pow(h, key.second) * derivs.at(static_cast<std::size_t>(key.first));
  }
  return sum;
}

CascadeControl wave_cascade_control(const ChainSpec& spec, const TargetSignal& f, const Grid& grid) {
  return cascade_control(spec, f, grid, 2, "wave");
}

CascadeControl heat_cascade_control(const ChainSpec& spec, const TargetSignal& f, const Grid& grid) {
  return cascade_control(spec, f, grid, 1, "heat");
}

}  // namespace trackctl
