#pragma once

// Mixed-norm Lebesgue and Orlicz functionals over grid functions.
//
// All integrals are midpoint sums over the grid cells, nested with axis 1
// innermost:
//
//   ||g||_P   = ( int ( ... ( int |g|^p1 dx1 )^(p2/p1) ... ) dx_r )^(1/p_r)
//   I^Phi[g]  = int phi_r( ... int phi_2( int phi_1(|g|) dx1 ) dx2 ... ) dx_r

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kantnn/error.hpp"
#include "kantnn/grid.hpp"

namespace kantnn {

namespace detail {

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline double parse_real(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (...) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw ConfigError("malformed " + std::string(what) + " '" + s + "'");
  }
  return v;
}

}  // namespace detail

/// Per-axis Lebesgue exponents (p_1, ..., p_r), each finite and >= 1.
class MixedExponents {
 public:
  MixedExponents(std::vector<double> p) : p_(std::move(p)) {  // NOLINT(google-explicit-constructor)
    if (p_.empty()) throw ConfigError("exponent tuple is empty");
    for (double v : p_) {
      if (!(std::isfinite(v) && v >= 1.0)) throw ConfigError("exponents must be finite and >= 1");
    }
  }
  MixedExponents(std::initializer_list<double> p) : MixedExponents(std::vector<double>(p)) {}

  /// Parses "p1,p2[,p3...]".
  static MixedExponents parse(std::string_view text) {
    std::vector<double> p;
    for (const auto& part : detail::split(text, ',')) p.push_back(detail::parse_real(part, "exponent"));
    return MixedExponents(std::move(p));
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }

  /// Hoelder conjugates q_i = p_i / (p_i - 1); needs every p_i > 1.
  MixedExponents conjugate() const {
    std::vector<double> q;
    for (double v : p_) {
      if (!(v > 1.0)) throw ArgumentError("exponent 1 has an infinite conjugate");
      q.push_back(v / (v - 1.0));
    }
    return MixedExponents(std::move(q));
  }

  std::string label() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < p_.size(); ++i) os << (i ? "," : "") << p_[i];
    return os.str();
  }

 private:
  std::vector<double> p_;
};

/// Orlicz function phi: power u^p, exponential e^(u^a) - 1, or
/// logarithmic u^a log^b(e + u).
class OrliczFunction {
 public:
  enum class Kind { power, exponential, logarithmic };

  static OrliczFunction power(double p) {
    if (!(std::isfinite(p) && p >= 1.0)) throw ConfigError("power Orlicz function needs p >= 1");
    return OrliczFunction(Kind::power, p, 0.0);
  }
  static OrliczFunction exponential(double alpha) {
    if (!(std::isfinite(alpha) && alpha > 0.0)) throw ConfigError("exponential Orlicz function needs alpha > 0");
    return OrliczFunction(Kind::exponential, alpha, 0.0);
  }
  static OrliczFunction logarithmic(double alpha, double beta) {
    if (!(std::isfinite(alpha) && alpha >= 1.0 && std::isfinite(beta) && beta > 0.0)) {
      throw ConfigError("logarithmic Orlicz function needs alpha >= 1 and beta > 0");
    }
    return OrliczFunction(Kind::logarithmic, alpha, beta);
  }

  /// Parses "pow:<p>", "exp:<alpha>" or "log:<alpha>:<beta>".
  static OrliczFunction parse(std::string_view token) {
    const auto parts = detail::split(token, ':');
    if (parts[0] == "pow" && parts.size() == 2) return power(detail::parse_real(parts[1], "power exponent"));
    if (parts[0] == "exp" && parts.size() == 2) return exponential(detail::parse_real(parts[1], "alpha"));
    if (parts[0] == "log" && parts.size() == 3) {
      return logarithmic(detail::parse_real(parts[1], "alpha"), detail::parse_real(parts[2], "beta"));
    }
    throw ConfigError("unknown Orlicz token '" + std::string(token) + "'");
  }

  Kind kind() const { return kind_; }
  double alpha() const { return a_; }
  double beta() const { return b_; }

  /// phi(u) for u >= 0; +inf when the exponential overflows.
  double operator()(double u) const {
    switch (kind_) {
      case Kind::power: return std::pow(u, a_);
      case Kind::exponential: return std::expm1(std::pow(u, a_));
      case Kind::logarithmic: return std::pow(u, a_) * std::pow(std::log(std::numbers::e + u), b_);
    }
    return 0.0;
  }

  std::string token() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::power: os << "pow:" << a_; break;
      case Kind::exponential: os << "exp:" << a_; break;
      case Kind::logarithmic: os << "log:" << a_ << ":" << b_; break;
    }
    return os.str();
  }

 private:
  OrliczFunction(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;
  double b_;
};

inline double orlicz_phi_eval(const OrliczFunction& phi, double u) {
  if (!(u >= 0.0)) throw ArgumentError("Orlicz functions are evaluated at u >= 0");
  return phi(u);
}

/// (phi_1, ..., phi_r), one Orlicz function per axis.
class OrliczVector {
 public:
  OrliczVector(std::vector<OrliczFunction> phis) : phis_(std::move(phis)) {  // NOLINT(google-explicit-constructor)
    if (phis_.empty()) throw ConfigError("Orlicz vector is empty");
  }
  OrliczVector(std::initializer_list<OrliczFunction> phis) : OrliczVector(std::vector<OrliczFunction>(phis)) {}

  /// Parses comma-joined tokens, e.g. "exp:2,log:2:1.7".
  static OrliczVector parse(std::string_view text) {
    std::vector<OrliczFunction> phis;
    for (const auto& part : detail::split(text, ',')) phis.push_back(OrliczFunction::parse(part));
    return OrliczVector(std::move(phis));
  }

  std::size_t size() const { return phis_.size(); }
  const OrliczFunction& operator[](std::size_t i) const { return phis_[i]; }

  std::string label() const {
    std::string s;
    for (std::size_t i = 0; i < phis_.size(); ++i) s += (i ? "," : "") + phis_[i].token();
    return s;
  }

 private:
  std::vector<OrliczFunction> phis_;
};

namespace detail {

// Collapses axis 0 of `values` (with extents `shape`) by summing
// h * term(v) along each line and mapping the line sum through `finish`.
template <class Term, class Finish>
std::vector<double> reduce_axis(const std::vector<double>& values, std::vector<std::size_t>& shape, double h,
                                Term&& term, Finish&& finish) {
  const std::size_t len = shape.front();
  const std::size_t lines = values.size() / len;
  std::vector<double> out(lines);
  for (std::size_t line = 0; line < lines; ++line) {
    double sum = 0.0;
    const double* v = values.data() + line * len;
    for (std::size_t i = 0; i < len; ++i) sum += term(v[i]);
    out[line] = finish(sum * h);
  }
  shape.erase(shape.begin());
  return out;
}

inline void check_dims(const GridFunction& g, std::size_t n, std::string_view what) {
  if (g.dim() != n) {
    throw ArgumentError(std::string(what) + " has " + std::to_string(n) + " entries but the grid has dimension " +
                        std::to_string(g.dim()));
  }
}

}  // namespace detail

inline double mixed_lebesgue_norm(const GridFunction& g, const MixedExponents& P) {
  detail::check_dims(g, P.size(), "exponent tuple");
  std::vector<double> level(g.values().begin(), g.values().end());
  for (double& v : level) v = std::fabs(v);
  std::vector<std::size_t> shape = g.shape();
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const double p = P[a];
    level = detail::reduce_axis(
        level, shape, g.spacing(a), [p](double v) { return std::pow(v, p); },
        [p](double s) { return std::pow(s, 1.0 / p); });
  }
  return level.front();
}

inline double mixed_lebesgue_error(const GridFunction& f, const GridFunction& g, const MixedExponents& P) {
  return mixed_lebesgue_norm(difference(f, g), P);
}

/// Value of a modular; `saturated` is set when an exponential overflowed and
/// the value is +inf.
struct ModularValue {
  double value = 0.0;
  bool saturated = false;
};

/// I^Phi[lambda g].
inline ModularValue mixed_orlicz_modular(const GridFunction& g, const OrliczVector& Phi, double lambda) {
  detail::check_dims(g, Phi.size(), "Orlicz vector");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("modular scale lambda must be positive");
  std::vector<double> level(g.values().begin(), g.values().end());
  for (double& v : level) v = lambda * std::fabs(v);
  std::vector<std::size_t> shape = g.shape();
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const OrliczFunction& phi = Phi[a];
    level = detail::reduce_axis(
        level, shape, g.spacing(a), [&phi](double v) { return phi(v); }, [](double s) { return s; });
  }
  const double v = level.front();
  if (std::isinf(v) || std::isnan(v)) return {std::numeric_limits<double>::infinity(), true};
  return {v, false};
}

/// inf { lambda > 0 : I^Phi[g / lambda] <= 1 } by bracketing and bisection.
inline double luxemburg_norm(const GridFunction& g, const OrliczVector& Phi) {
  detail::check_dims(g, Phi.size(), "Orlicz vector");
  if (std::all_of(g.values().begin(), g.values().end(), [](double v) { return v == 0.0; })) return 0.0;
  auto residual = [&](double lambda) { return mixed_orlicz_modular(g, Phi, 1.0 / lambda).value - 1.0; };

  double lo = 1.0;
  double hi = 1.0;
  int guard = 0;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 2000) throw NumericError("Luxemburg norm: no upper bracket found");
  }
  lo = hi;
  while (residual(lo) <= 0.0) {
    lo *= 0.5;
    if (++guard > 4000) throw NumericError("Luxemburg norm: no lower bracket found");
  }
  for (int step = 0; step < 200; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::fabs(r) <= 1e-8) return mid;
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericError("Luxemburg norm: bisection did not reach the 1e-8 residual in 200 steps");
}

/// max |f - g| over the grid.
inline double sup_error(const GridFunction& f, const GridFunction& g) {
  if (f.shape() != g.shape()) throw ArgumentError("grid functions differ in shape");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::fabs(f[i] - g[i]));
  return m;
}

struct HolderReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||f g||_(1,...,1) against ||f||_P ||g||_Q with Q the conjugate of P.
inline HolderReport holder_check(const GridFunction& f, const GridFunction& g, const MixedExponents& P) {
  if (!f.same_layout(g)) throw ArgumentError("grid functions differ in shape or domain");
  const MixedExponents Q = P.conjugate();
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
  const GridFunction fg(f.domain(), f.shape(), std::move(prod));
  HolderReport report;
  report.lhs = mixed_lebesgue_norm(fg, MixedExponents(std::vector<double>(f.dim(), 1.0)));
  report.rhs = mixed_lebesgue_norm(f, P) * mixed_lebesgue_norm(g, Q);
  report.holds = report.lhs <= report.rhs + 1e-9;
  return report;
}

}  // namespace kantnn
