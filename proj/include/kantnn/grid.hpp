#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kantnn/error.hpp"

namespace kantnn {

/// Axis-aligned box [lower_1, upper_1] x ... x [lower_r, upper_r].
class BoxDomain {
 public:
  BoxDomain(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size()) {
      throw ArgumentError("box bounds must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!(std::isfinite(lower_[i]) && std::isfinite(upper_[i]) && lower_[i] < upper_[i])) {
        throw ArgumentError("box axis " + std::to_string(i + 1) + " needs finite lower < upper");
      }
    }
  }

  static BoxDomain cube(std::size_t dim, double lo, double hi) {
    return BoxDomain(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
  }
  static BoxDomain unit(std::size_t dim) { return cube(dim, 0.0, 1.0); }

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t axis) const { return lower_[axis]; }
  double upper(std::size_t axis) const { return upper_[axis]; }
  double extent(std::size_t axis) const { return upper_[axis] - lower_[axis]; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  friend bool operator==(const BoxDomain&, const BoxDomain&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Samples of a scalar field on the cell centres of a uniform grid.
///
/// Axis 0 varies fastest in `values`.
/// Each sample owns the cell of width extent/shape around it, which is also
/// the quadrature weight every norm uses.
class GridFunction {
 public:
  GridFunction(BoxDomain domain, std::vector<std::size_t> shape, std::vector<double> values)
      : domain_(std::move(domain)), shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_.size() != domain_.dim()) throw ArgumentError("grid shape and domain dimension differ");
    std::size_t total = 1;
    for (std::size_t s : shape_) {
      if (s == 0) throw ArgumentError("grid shape entries must be positive");
      total *= s;
    }
    if (total != values_.size()) {
      throw ArgumentError("grid holds " + std::to_string(values_.size()) + " values, shape needs " +
                          std::to_string(total));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw NumericError("non-finite grid value at flat index " + std::to_string(i));
      }
    }
  }

  static GridFunction constant(BoxDomain domain, std::vector<std::size_t> shape, double c) {
    std::size_t total = 1;
    for (std::size_t s : shape) total *= s;
    return GridFunction(std::move(domain), std::move(shape), std::vector<double>(total, c));
  }

  /// Evaluates `field(point)` at every cell centre.
  template <class Field>
  static GridFunction sample(BoxDomain domain, std::vector<std::size_t> shape, Field&& field) {
    GridFunction g = constant(domain, shape, 0.0);
    std::vector<double> point(g.dim());
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      g.center(flat, point);
      g.values_[flat] = field(std::span<const double>(point));
      if (!std::isfinite(g.values_[flat])) {
        throw NumericError("non-finite field sample at flat index " + std::to_string(flat));
      }
    }
    return g;
  }

  const BoxDomain& domain() const { return domain_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t dim() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }

  double spacing(std::size_t axis) const {
    return domain_.extent(axis) / static_cast<double>(shape_[axis]);
  }
  double center(std::size_t axis, std::size_t i) const {
    return domain_.lower(axis) + (static_cast<double>(i) + 0.5) * spacing(axis);
  }

  /// Writes the cell centre of `flat` into `point` (size dim()).
  void center(std::size_t flat, std::span<double> point) const {
    for (std::size_t a = 0; a < dim(); ++a) {
      point[a] = center(a, flat % shape_[a]);
      flat /= shape_[a];
    }
  }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }

  /// Step-function view: value of the cell containing x, clamped to the box.
  double operator()(std::span<const double> x) const {
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < dim(); ++a) {
      const double t = (x[a] - domain_.lower(a)) / spacing(a);
      const double clamped = std::clamp(std::floor(t), 0.0, static_cast<double>(shape_[a] - 1));
      flat += static_cast<std::size_t>(clamped) * stride;
      stride *= shape_[a];
    }
    return values_[flat];
  }

  /// Same samples, reinterpreted on another box (e.g. unit pixel cells).
  GridFunction with_domain(BoxDomain domain) const { return GridFunction(std::move(domain), shape_, values_); }

  bool same_layout(const GridFunction& other) const {
    return shape_ == other.shape_ && domain_ == other.domain_;
  }

 private:
  BoxDomain domain_;
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

/// Pointwise f - g; both grids must share shape and domain.
inline GridFunction difference(const GridFunction& f, const GridFunction& g) {
  if (!f.same_layout(g)) throw ArgumentError("grid functions differ in shape or domain");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] - g[i];
  return GridFunction(f.domain(), f.shape(), std::move(out));
}

/// Box [0, shape_1] x ... giving every sample a unit cell.
inline BoxDomain pixel_domain(const std::vector<std::size_t>& shape) {
  std::vector<double> upper(shape.begin(), shape.end());
  return BoxDomain(std::vector<double>(shape.size(), 0.0), std::move(upper));
}

}  // namespace kantnn
