#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "trackctl/linalg.hpp"

namespace trackctl {

namespace detail {
struct TargetNode;
}

// Scalar reference signal f(t) with closed-form derivatives.
//
// Analytic kinds (polynomial, sinusoid, exponential and their sums/products)
// differentiate exactly to any order. A floor staircase has no derivatives;
// a tabulated signal is a cubic B-spline through uniform samples and exposes
// spline derivatives up to order 2 (these are interpolant derivatives, not
// derivatives of whatever produced the samples).
//
// Values are immutable and cheap to copy (shared node tree).
class TargetSignal {
 public:
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  /// c[0] + c[1] t + c[2] t^2 + ...
  static TargetSignal polynomial(std::vector<double> coeffs);
  /// amplitude * sin(angular_freq * t + phase)
  static TargetSignal sinusoid(double amplitude, double angular_freq, double phase);
  /// amplitude * exp(rate * t)
  static TargetSignal exponential(double amplitude, double rate);
  /// floor(t + offset), right-continuous at the jumps.
  static TargetSignal floor_shift(double offset);
  /// Uniform samples on [0, horizon]; needs at least 4 samples.
  static TargetSignal tabulated(double horizon, std::vector<double> samples);
  static TargetSignal weighted_sum(std::vector<std::pair<double, TargetSignal>> terms);
  static TargetSignal product(std::vector<TargetSignal> factors);
  static TargetSignal zero();

  /// f(t) - E A^k e^{At} x0 for the k-th derivative (E a single row).
  static TargetSignal minus_free_output(TargetSignal base, RowVector E, Matrix A, Vector x0);

  /// Same signal, but derivative queries above `order` are refused.
  TargetSignal with_max_order(int order) const;

  int max_exact_derivative() const;
  std::string kind() const;

  /// k-th derivative at t. Throws InsufficientRegularity if k is above
  /// max_exact_derivative().
  double eval(int k, double t) const;
  double operator()(double t) const { return eval(0, t); }

  /// All derivatives of orders 0..kmax at t (one pass).
  std::vector<double> derivatives(double t, int kmax) const;

 private:
  explicit TargetSignal(std::shared_ptr<const detail::TargetNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::TargetNode> node_;
};

}  // namespace trackctl
