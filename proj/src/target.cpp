#include "trackctl/target.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <numbers>

#include "trackctl/error.hpp"

namespace trackctl {
namespace detail {

struct TargetNode {
  virtual ~TargetNode() = default;
  virtual int max_order() const = 0;
  virtual const char* kind() const = 0;
  // out[0..kmax] receives derivatives of order 0..kmax; kmax <= max_order().
  virtual void derivs(double t, int kmax, double* out) const = 0;
};

namespace {

class Polynomial final : public TargetNode {
 public:
  explicit Polynomial(std::vector<double> c) : c_(std::move(c)) {}
  int max_order() const override { return TargetSignal::kUnbounded; }
  const char* kind() const override { return "polynomial"; }
  void derivs(double t, int kmax, double* out) const override {
    const int degree = static_cast<int>(c_.size()) - 1;
    for (int k = 0; k <= kmax; ++k) {
      double acc = 0.0;
      // Horner on the k-th derivative's coefficients j!/(j-k)! c_j.
      for (int j = degree; j >= k; --j) {
        double falling = 1.0;
        for (int i = 0; i < k; ++i) falling *= static_cast<double>(j - i);
        acc = acc * t + falling * c_[static_cast<std::size_t>(j)];
      }
      out[k] = acc;
    }
  }

 private:
  std::vector<double> c_;
};

class Sinusoid final : public TargetNode {
 public:
  Sinusoid(double amp, double omega, double phase) : amp_(amp), omega_(omega), phase_(phase) {}
  int max_order() const override { return TargetSignal::kUnbounded; }
  const char* kind() const override { return "sinusoid"; }
  void derivs(double t, int kmax, double* out) const override {
    const double s = std::sin(omega_ * t + phase_);
    const double c = std::cos(omega_ * t + phase_);
    double scale = amp_;
    for (int k = 0; k <= kmax; ++k) {
      // d^k/dt^k sin(x) cycles sin, cos, -sin, -cos
      switch (k % 4) {
        case 0: out[k] = scale * s; break;
        case 1: out[k] = scale * c; break;
        case 2: out[k] = -scale * s; break;
        default: out[k] = -scale * c; break;
      }
      scale *= omega_;
    }
  }

 private:
  double amp_, omega_, phase_;
};

class Exponential final : public TargetNode {
 public:
  Exponential(double amp, double rate) : amp_(amp), rate_(rate) {}
  int max_order() const override { return TargetSignal::kUnbounded; }
  const char* kind() const override { return "exponential"; }
  void derivs(double t, int kmax, double* out) const override {
    double v = amp_ * std::exp(rate_ * t);
    for (int k = 0; k <= kmax; ++k) {
      out[k] = v;
      v *= rate_;
    }
  }

 private:
  double amp_, rate_;
};

class FloorShift final : public TargetNode {
 public:
  explicit FloorShift(double offset) : offset_(offset) {}
  int max_order() const override { return 0; }
  const char* kind() const override { return "floor"; }
  void derivs(double t, int, double* out) const override {
    // Grid nodes such as k*dt can land a few ulps below an integer; nudge
    // upward so the staircase takes its right limit there.
    const double x = t + offset_;
    out[0] = std::floor(x + 1e-12 * (1.0 + std::abs(x)));
  }

 private:
  double offset_;
};

class Tabulated final : public TargetNode {
 public:
  Tabulated(double horizon, std::vector<double> samples)
      : spline_(samples.begin(), samples.end(), 0.0,
                horizon / static_cast<double>(samples.size() - 1)) {}
  int max_order() const override { return 2; }
  const char* kind() const override { return "tabulated"; }
  void derivs(double t, int kmax, double* out) const override {
    out[0] = spline_(t);
    if (kmax >= 1) out[1] = spline_.prime(t);
    if (kmax >= 2) out[2] = spline_.double_prime(t);
  }

 private:
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

class WeightedSum final : public TargetNode {
 public:
  explicit WeightedSum(std::vector<std::pair<double, TargetSignal>> terms)
      : terms_(std::move(terms)) {}
  int max_order() const override {
    int order = TargetSignal::kUnbounded;
    for (const auto& [w, f] : terms_) order = std::min(order, f.max_exact_derivative());
    return order;
  }
  const char* kind() const override { return "sum"; }
  void derivs(double t, int kmax, double* out) const override {
    std::fill(out, out + kmax + 1, 0.0);
    for (const auto& [w, f] : terms_) {
      const auto d = f.derivatives(t, kmax);
      for (int k = 0; k <= kmax; ++k) out[k] += w * d[static_cast<std::size_t>(k)];
    }
  }

 private:
  std::vector<std::pair<double, TargetSignal>> terms_;
};

class Product final : public TargetNode {
 public:
  explicit Product(std::vector<TargetSignal> factors) : factors_(std::move(factors)) {}
  int max_order() const override {
    int order = TargetSignal::kUnbounded;
    for (const auto& f : factors_) order = std::min(order, f.max_exact_derivative());
    return order;
  }
  const char* kind() const override { return "product"; }
  void derivs(double t, int kmax, double* out) const override {
    // Fold Leibniz' rule over the factors, all orders at once.
    std::vector<double> acc(static_cast<std::size_t>(kmax) + 1, 0.0);
    acc[0] = 1.0;
    std::vector<double> next(acc.size());
    const auto binom = binomials(kmax);
    for (const auto& f : factors_) {
      const auto d = f.derivatives(t, kmax);
      for (int k = 0; k <= kmax; ++k) {
        double s = 0.0;
        for (int i = 0; i <= k; ++i) {
          s += binom[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
               acc[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(k - i)];
        }
        next[static_cast<std::size_t>(k)] = s;
      }
      acc.swap(next);
    }
    std::copy(acc.begin(), acc.end(), out);
  }

 private:
  static std::vector<std::vector<double>> binomials(int kmax) {
    std::vector<std::vector<double>> c(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) {
      auto& row = c[static_cast<std::size_t>(k)];
      row.assign(static_cast<std::size_t>(k) + 1, 1.0);
      for (int i = 1; i < k; ++i) {
        row[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)] +
                                           c[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
      }
    }
    return c;
  }

  std::vector<TargetSignal> factors_;
};

class MinusFreeOutput final : public TargetNode {
 public:
  MinusFreeOutput(TargetSignal base, RowVector E, Matrix A, Vector x0)
      : base_(std::move(base)), E_(std::move(E)), A_(std::move(A)), x0_(std::move(x0)) {}
  int max_order() const override { return base_.max_exact_derivative(); }
  const char* kind() const override { return "shifted"; }
  void derivs(double t, int kmax, double* out) const override {
    const auto d = base_.derivatives(t, kmax);
    Vector x = linalg::mat_exp(A_, t) * x0_;
    for (int k = 0; k <= kmax; ++k) {
      out[k] = d[static_cast<std::size_t>(k)] - E_.dot(x);
      x = A_ * x;
    }
  }

 private:
  TargetSignal base_;
  RowVector E_;
  Matrix A_;
  Vector x0_;
};

class Capped final : public TargetNode {
 public:
  Capped(TargetSignal base, int cap) : base_(std::move(base)), cap_(cap) {}
  int max_order() const override { return std::min(cap_, base_.max_exact_derivative()); }
  const char* kind() const override { return "capped"; }
  void derivs(double t, int kmax, double* out) const override {
    const auto d = base_.derivatives(t, kmax);
    std::copy(d.begin(), d.end(), out);
  }

 private:
  TargetSignal base_;
  int cap_;
};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("target parameter '") + what +
                                                 "' must be finite");
  }
}

}  // namespace
}  // namespace detail

TargetSignal TargetSignal::polynomial(std::vector<double> coeffs) {
  for (double c : coeffs) detail::require_finite(c, "coeffs");
  if (coeffs.empty()) coeffs.push_back(0.0);
  return TargetSignal(std::make_shared<detail::Polynomial>(std::move(coeffs)));
}

TargetSignal TargetSignal::sinusoid(double amplitude, double angular_freq, double phase) {
  detail::require_finite(amplitude, "amp");
  detail::require_finite(angular_freq, "omega");
  detail::require_finite(phase, "phase");
  return TargetSignal(std::make_shared<detail::Sinusoid>(amplitude, angular_freq, phase));
}

TargetSignal TargetSignal::exponential(double amplitude, double rate) {
  detail::require_finite(amplitude, "amp");
  detail::require_finite(rate, "rate");
  return TargetSignal(std::make_shared<detail::Exponential>(amplitude, rate));
}

TargetSignal TargetSignal::floor_shift(double offset) {
  detail::require_finite(offset, "offset");
  return TargetSignal(std::make_shared<detail::FloorShift>(offset));
}

TargetSignal TargetSignal::tabulated(double horizon, std::vector<double> samples) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::kInvalidArgument, "tabulated target needs a positive horizon");
  }
  if (samples.size() < 5) {
    throw Error(ErrorCode::kInvalidArgument, "tabulated target needs at least 5 samples");
  }
  for (double v : samples) detail::require_finite(v, "values");
  return TargetSignal(std::make_shared<detail::Tabulated>(horizon, std::move(samples)));
}

TargetSignal TargetSignal::weighted_sum(std::vector<std::pair<double, TargetSignal>> terms) {
  for (const auto& term : terms) detail::require_finite(term.first, "weight");
  return TargetSignal(std::make_shared<detail::WeightedSum>(std::move(terms)));
}

TargetSignal TargetSignal::product(std::vector<TargetSignal> factors) {
  return TargetSignal(std::make_shared<detail::Product>(std::move(factors)));
}

TargetSignal TargetSignal::zero() { return polynomial({0.0}); }

TargetSignal TargetSignal::minus_free_output(TargetSignal base, RowVector E, Matrix A, Vector x0) {
  return TargetSignal(std::make_shared<detail::MinusFreeOutput>(std::move(base), std::move(E),
                                                                std::move(A), std::move(x0)));
}

TargetSignal TargetSignal::with_max_order(int order) const {
  if (order < 0) {
    throw Error(ErrorCode::kInvalidArgument, "declared derivative order must be >= 0");
  }
  return TargetSignal(std::make_shared<detail::Capped>(*this, order));
}

int TargetSignal::max_exact_derivative() const { return node_->max_order(); }

std::string TargetSignal::kind() const { return node_->kind(); }

std::vector<double> TargetSignal::derivatives(double t, int kmax) const {
  if (kmax < 0) throw Error(ErrorCode::kInvalidArgument, "derivative order must be >= 0");
  if (kmax > node_->max_order()) {
    throw Error(ErrorCode::kInsufficientRegularity,
                "target of kind '" + kind() + "' has exact derivatives up to order " +
                    std::to_string(node_->max_order()) + ", order " + std::to_string(kmax) +
                    " requested");
  }
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  node_->derivs(t, kmax, out.data());
  return out;
}

double TargetSignal::eval(int k, double t) const { return derivatives(t, k).back(); }

}  // namespace trackctl
