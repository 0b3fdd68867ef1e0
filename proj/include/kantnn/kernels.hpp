#pragma once

// Sigmoidal activations and the density kernels built from them.
//
// Every sigmoid is scaled to the limits 0 at -inf and 1 at +inf, and the
// density is psi(x) = (rho(x + 1) - rho(x - 1)) / 2, so that psi has unit
// mass and its integer shifts sum to one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "kantnn/error.hpp"

namespace kantnn {

enum class SigmoidFamily { logistic, tanh, ramp, bspline };

/// Which sigmoid drives the kernel. `order` is only meaningful for B-splines.
struct SigmoidKind {
  SigmoidFamily family = SigmoidFamily::logistic;
  int order = 0;

  static constexpr SigmoidKind logistic() { return {SigmoidFamily::logistic, 0}; }
  static constexpr SigmoidKind tanh() { return {SigmoidFamily::tanh, 0}; }
  static constexpr SigmoidKind ramp() { return {SigmoidFamily::ramp, 0}; }
  static constexpr SigmoidKind bspline(int order) { return {SigmoidFamily::bspline, order}; }

  /// Parses "logistic" | "tanh" | "ramp" | "bspline:<order>".
  static SigmoidKind parse(std::string_view token);
  std::string token() const;

  friend bool operator==(const SigmoidKind&, const SigmoidKind&) = default;
};

namespace detail {

inline void check_kind(const SigmoidKind& kind) {
  if (kind.family == SigmoidFamily::bspline && (kind.order < 1 || kind.order > 4)) {
    throw ConfigError("unsupported B-spline order " + std::to_string(kind.order) +
                      " (supported: 1..4)");
  }
}

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// logistic(a) - logistic(b) for a >= b >= -1 without cancellation in the tail.
inline double logistic_gap(double a, double b) {
  const double ea = std::exp(-a);
  const double eb = std::exp(-b);
  return (eb - ea) / ((1.0 + ea) * (1.0 + eb));
}

inline double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Antiderivative of the central B-spline of order n:
// sum_i (-1)^i C(n,i) (x + n/2 - i)_+^n / n!
inline double bspline_sigmoid(int order, double x) {
  const double half = 0.5 * order;
  if (x <= -half) return 0.0;
  if (x >= half) return 1.0;
  double factorial = 1.0;
  for (int i = 2; i <= order; ++i) factorial *= i;
  double sum = 0.0;
  for (int i = 0; i <= order; ++i) {
    const double t = x + half - i;
    if (t <= 0.0) break;
    const double term = binomial(order, i) * std::pow(t, order);
    sum += (i % 2 == 0) ? term : -term;
  }
  return sum / factorial;
}

}  // namespace detail

inline SigmoidKind SigmoidKind::parse(std::string_view token) {
  if (token == "logistic") return logistic();
  if (token == "tanh") return tanh();
  if (token == "ramp") return ramp();
  constexpr std::string_view prefix = "bspline:";
  if (token.substr(0, prefix.size()) == prefix) {
    const std::string digits(token.substr(prefix.size()));
    std::size_t used = 0;
    int order = 0;
    try {
      order = std::stoi(digits, &used);
    } catch (...) {
      used = 0;
    }
    if (digits.empty() || used != digits.size()) {
      throw ConfigError("malformed B-spline order in kernel token '" + std::string(token) + "'");
    }
    SigmoidKind kind = bspline(order);
    detail::check_kind(kind);
    return kind;
  }
  throw ConfigError("unknown kernel '" + std::string(token) +
                    "' (expected logistic, tanh, ramp or bspline:<order>)");
}

inline std::string SigmoidKind::token() const {
  switch (family) {
    case SigmoidFamily::logistic: return "logistic";
    case SigmoidFamily::tanh: return "tanh";
    case SigmoidFamily::ramp: return "ramp";
    case SigmoidFamily::bspline: return "bspline:" + std::to_string(order);
  }
  return {};
}

/// Sigmoid value in [0, 1]; non-decreasing, 0 at -inf, 1 at +inf.
inline double sigmoid_eval(const SigmoidKind& kind, double x) {
  detail::check_kind(kind);
  switch (kind.family) {
    case SigmoidFamily::logistic: return detail::logistic(x);
    // 2e^x / (e^x + e^-x) halved, i.e. logistic(2x).
    case SigmoidFamily::tanh: return detail::logistic(2.0 * x);
    case SigmoidFamily::ramp:
      if (x < -0.5) return 0.0;
      if (x > 0.5) return 1.0;
      return x + 0.5;
    case SigmoidFamily::bspline: return detail::bspline_sigmoid(kind.order, x);
  }
  return 0.0;
}

/// Density kernel psi_rho with cached constants.
///
/// `psi_at_2()` is psi(2), the lower bound of the truncated shift sum on
/// [-1, 1]. It is zero for the ramp and for B-splines of order 1 and 2,
/// whose support radius does not exceed 2.
class DensityKernel {
 public:
  static constexpr double kDefaultTailCutoff = 40.0;

  explicit DensityKernel(SigmoidKind kind, double tail_cutoff = kDefaultTailCutoff)
      : kind_(kind), tail_cutoff_(tail_cutoff) {
    detail::check_kind(kind_);
    if (!(tail_cutoff_ > 0.0)) throw ConfigError("tail cutoff must be positive");
    switch (kind_.family) {
      case SigmoidFamily::ramp: support_radius_ = 1.5; break;
      case SigmoidFamily::bspline: support_radius_ = 0.5 * kind_.order + 1.0; break;
      default: support_radius_ = std::numeric_limits<double>::infinity(); break;
    }
    psi_at_2_ = (*this)(2.0);
  }

  static DensityKernel parse(std::string_view token) { return DensityKernel(SigmoidKind::parse(token)); }

  const SigmoidKind& kind() const { return kind_; }
  double support_radius() const { return support_radius_; }
  bool compact() const { return std::isfinite(support_radius_); }
  double tail_cutoff() const { return tail_cutoff_; }
  double psi_at_2() const { return psi_at_2_; }

  /// Radius beyond which the kernel is treated as zero in shift sums.
  double effective_radius() const { return compact() ? support_radius_ : tail_cutoff_; }

  double operator()(double x) const {
    const double ax = std::fabs(x);
    switch (kind_.family) {
      case SigmoidFamily::logistic: return 0.5 * detail::logistic_gap(ax + 1.0, ax - 1.0);
      case SigmoidFamily::tanh:
        return 0.5 * detail::logistic_gap(2.0 * (ax + 1.0), 2.0 * (ax - 1.0));
      case SigmoidFamily::ramp:
      case SigmoidFamily::bspline:
        if (ax >= support_radius_) return 0.0;
        return 0.5 * (sigmoid_eval(kind_, ax + 1.0) - sigmoid_eval(kind_, ax - 1.0));
    }
    return 0.0;
  }

 private:
  SigmoidKind kind_;
  double tail_cutoff_;
  double support_radius_ = 0.0;
  double psi_at_2_ = 0.0;
};

inline double density_eval(const DensityKernel& kernel, double x) { return kernel(x); }

/// Tensor-product density psi(x_1) * ... * psi(x_r).
inline double density_product(const DensityKernel& kernel, std::span<const double> xs) {
  if (xs.empty()) throw ArgumentError("density_product needs at least one coordinate");
  double p = 1.0;
  for (double x : xs) {
    p *= kernel(x);
    if (p == 0.0) break;
  }
  return p;
}

/// Midpoint-rule mass of the kernel.
///
/// Unbounded kernels are integrated over [-tail_cutoff, tail_cutoff].
/// Compact kernels are piecewise polynomial with breakpoints on the
/// half-integer lattice; there the rule runs over [-R, R] with every panel
/// edge on a breakpoint.
inline double density_l1(const DensityKernel& kernel, int quad_points) {
  if (quad_points < 64) throw ArgumentError("density_l1 needs at least 64 quadrature points");
  if (!kernel.compact()) {
    const double a = -kernel.tail_cutoff();
    const double h = 2.0 * kernel.tail_cutoff() / quad_points;
    double sum = 0.0;
    for (int i = 0; i < quad_points; ++i) sum += kernel(a + (i + 0.5) * h);
    return sum * h;
  }
  const double radius = kernel.support_radius();
  const int panels = static_cast<int>(std::lround(4.0 * radius));
  const int per_panel = std::max(1, quad_points / panels);
  const double h = 0.5 / per_panel;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -radius + 0.5 * p;
    for (int i = 0; i < per_panel; ++i) sum += kernel(a + (i + 0.5) * h);
  }
  return sum * h;
}

}  // namespace kantnn
