#pragma once

// Multivariate Kantorovich-type neural network operator
//
//   K_n f(x) = sum_k A_k psi(n x - k) / sum_k psi(n x - k),   k in [-n, n-1]^r,
//
// with A_k the mean of f over the cell prod_j [k_j / n, (k_j + 1) / n] and
// psi the tensor-product density kernel.
//
// The operator works in canonical coordinates: the user box is mapped
// affinely onto [0, 1]^r (or [-1, 1]^r with Placement::symmetric). Cells
// reaching outside the canonical box read the field at the nearest point
// of the box.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kantnn/error.hpp"
#include "kantnn/grid.hpp"
#include "kantnn/kernels.hpp"
#include "kantnn/parallel.hpp"

namespace kantnn {

enum class Placement {
  unit,       ///< box -> [0, 1]^r, the image and example convention
  symmetric,  ///< box -> [-1, 1]^r, every cell inside the box
};

inline constexpr int kDefaultSubsamples = 4;

namespace detail {

inline double canonical_lo(Placement p) { return p == Placement::unit ? 0.0 : -1.0; }

inline double to_canonical(const BoxDomain& box, Placement p, std::size_t axis, double x) {
  const double lo = canonical_lo(p);
  return lo + (x - box.lower(axis)) / box.extent(axis) * (1.0 - lo);
}

inline double from_canonical(const BoxDomain& box, Placement p, std::size_t axis, double t) {
  const double lo = canonical_lo(p);
  const double x = box.lower(axis) + (t - lo) / (1.0 - lo) * box.extent(axis);
  return std::clamp(x, box.lower(axis), box.upper(axis));
}

inline std::string cell_label(std::span<const int> k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(k[i]);
  }
  return s + ")";
}

}  // namespace detail

/// Kantorovich coefficients A_k, k in [-n, n-1]^r, stored densely with
/// offset n and axis 1 fastest. Cells may be flagged inactive when a masked
/// field had no valid sample in them.
class CellAverageTensor {
 public:
  CellAverageTensor(BoxDomain domain, int n, std::vector<double> coeffs,
                    std::vector<unsigned char> active = {}, Placement placement = Placement::unit)
      : domain_(std::move(domain)),
        n_(n),
        placement_(placement),
        coeffs_(std::move(coeffs)),
        active_(std::move(active)) {
    if (n_ < 1) throw ArgumentError("n must be at least 1");
    std::size_t expect = 1;
    for (std::size_t a = 0; a < domain_.dim(); ++a) expect *= side();
    if (coeffs_.size() != expect) throw ArgumentError("coefficient tensor must hold (2n)^r entries");
    if (!active_.empty() && active_.size() != expect) throw ArgumentError("activity mask has wrong size");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (!std::isfinite(coeffs_[i])) throw NumericError("non-finite coefficient at flat index " + std::to_string(i));
    }
  }

  const BoxDomain& domain() const { return domain_; }
  Placement placement() const { return placement_; }
  int n() const { return n_; }
  std::size_t dim() const { return domain_.dim(); }
  std::size_t side() const { return 2 * static_cast<std::size_t>(n_); }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const double> coeffs() const { return coeffs_; }
  bool masked() const { return !active_.empty(); }

  std::size_t flat_index(std::span<const int> k) const {
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < dim(); ++a) {
      flat += static_cast<std::size_t>(k[a] + n_) * stride;
      stride *= side();
    }
    return flat;
  }
  double at(std::span<const int> k) const { return coeffs_[flat_index(k)]; }
  bool active(std::size_t flat) const { return active_.empty() || active_[flat] != 0; }

 private:
  BoxDomain domain_;
  int n_;
  Placement placement_;
  std::vector<double> coeffs_;
  std::vector<unsigned char> active_;
};

namespace detail {

// Shared driver for plain and masked coefficient construction. `sample`
// returns std::optional<double>; nullopt marks an invalid subsample.
template <class Sample>
CellAverageTensor build_cells(const BoxDomain& domain, int n, int m, Placement placement, bool masked,
                              Sample&& sample) {
  if (n < 1) throw ArgumentError("n must be at least 1");
  if (m < 1) throw ArgumentError("m must be at least 1");
  const std::size_t r = domain.dim();
  const std::size_t side = 2 * static_cast<std::size_t>(n);
  std::size_t cells = 1;
  std::size_t subs = 1;
  for (std::size_t a = 0; a < r; ++a) {
    cells *= side;
    subs *= static_cast<std::size_t>(m);
  }

  // Subsample coordinates per axis, mapped back into the box:
  // coords[a][k + n][p] for canonical k/n + (p + 0.5)/(n m).
  std::vector<std::vector<std::vector<double>>> coords(r);
  for (std::size_t a = 0; a < r; ++a) {
    coords[a].assign(side, std::vector<double>(static_cast<std::size_t>(m)));
    for (std::size_t c = 0; c < side; ++c) {
      const int k = static_cast<int>(c) - n;
      for (int p = 0; p < m; ++p) {
        const double t = static_cast<double>(k) / n + (p + 0.5) / (static_cast<double>(n) * m);
        coords[a][c][static_cast<std::size_t>(p)] = from_canonical(domain, placement, a, t);
      }
    }
  }

  std::vector<double> coeffs(cells, 0.0);
  std::vector<unsigned char> active(masked ? cells : 0, 1);

  parallel_for(cells, [&](std::size_t cell) {
    std::vector<std::size_t> ci(r);
    std::size_t rem = cell;
    for (std::size_t a = 0; a < r; ++a) {
      ci[a] = rem % side;
      rem /= side;
    }
    std::vector<double> point(r);
    double first = 0.0;
    double sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t s = 0; s < subs; ++s) {
      std::size_t srem = s;
      for (std::size_t a = 0; a < r; ++a) {
        point[a] = coords[a][ci[a]][srem % static_cast<std::size_t>(m)];
        srem /= static_cast<std::size_t>(m);
      }
      const std::optional<double> v = sample(std::span<const double>(point));
      if (!v) continue;
      if (!std::isfinite(*v)) {
        std::vector<int> k(r);
        for (std::size_t a = 0; a < r; ++a) k[a] = static_cast<int>(ci[a]) - n;
        throw NumericError("non-finite field sample in cell k=" + cell_label(k));
      }
      if (valid == 0) first = *v;
      sum += *v - first;
      ++valid;
    }
    if (valid == 0) {
      if (masked) active[cell] = 0;
      return;
    }
    coeffs[cell] = first + sum / static_cast<double>(valid);
  });
  return CellAverageTensor(domain, n, std::move(coeffs), std::move(active), placement);
}

}  // namespace detail

/// m^r-point midpoint estimate of the mean of `field` over every cell.
/// `field` is called with a point of `domain` (std::span<const double>).
template <class Field>
CellAverageTensor cell_averages(Field&& field, const BoxDomain& domain, int n, int m = kDefaultSubsamples,
                                Placement placement = Placement::unit) {
  return detail::build_cells(domain, n, m, placement, false,
                             [&](std::span<const double> x) -> std::optional<double> { return field(x); });
}

/// Like cell_averages, but `field` returns std::optional<double>; only
/// valid subsamples are averaged and cells without any are deactivated.
template <class Field>
CellAverageTensor cell_averages_masked(Field&& field, const BoxDomain& domain, int n, int m = kDefaultSubsamples,
                                       Placement placement = Placement::unit) {
  return detail::build_cells(domain, n, m, placement, true, std::forward<Field>(field));
}

/// K_n f at a point of the coefficient box.
inline double kantorovich_eval(const CellAverageTensor& cells, const DensityKernel& kernel,
                               std::span<const double> x) {
  const std::size_t r = cells.dim();
  if (x.size() != r) throw ArgumentError("evaluation point has wrong dimension");
  const int n = cells.n();
  const double radius = kernel.effective_radius();
  const BoxDomain& box = cells.domain();

  // Per-axis windows of contributing k and their kernel weights.
  std::vector<int> first(r);
  std::vector<std::vector<double>> weights(r);
  for (std::size_t a = 0; a < r; ++a) {
    const double slack = 1e-9 * box.extent(a);
    if (x[a] < box.lower(a) - slack || x[a] > box.upper(a) + slack) {
      throw ArgumentError("evaluation point outside the operator domain on axis " + std::to_string(a + 1));
    }
    const double u = n * detail::to_canonical(box, cells.placement(), a, x[a]);
    const int k_lo = std::max(-n, static_cast<int>(std::ceil(u - radius)));
    const int k_hi = std::min(n - 1, static_cast<int>(std::floor(u + radius)));
    first[a] = k_lo;
    for (int k = k_lo; k <= k_hi; ++k) weights[a].push_back(kernel(u - k));
    if (weights[a].empty()) throw NumericError("no kernel shift reaches the evaluation point");
  }

  // Odometer over the tensor-product window. Deviations from the first
  // active coefficient are accumulated, so constants come back exactly.
  std::vector<std::size_t> idx(r, 0);
  std::vector<int> k(r);
  double num = 0.0;
  double den = 0.0;
  double base = 0.0;
  bool have_base = false;
  const std::size_t inner = weights[0].size();
  while (true) {
    double outer_w = 1.0;
    for (std::size_t a = 1; a < r; ++a) {
      outer_w *= weights[a][idx[a]];
      k[a] = first[a] + static_cast<int>(idx[a]);
    }
    if (outer_w != 0.0) {
      k[0] = first[0];
      std::size_t flat = cells.flat_index(k);
      for (std::size_t i = 0; i < inner; ++i, ++flat) {
        if (!cells.active(flat)) continue;
        if (!have_base) {
          base = cells.coeffs()[flat];
          have_base = true;
        }
        const double w = outer_w * weights[0][i];
        num += w * (cells.coeffs()[flat] - base);
        den += w;
      }
    }
    std::size_t a = 1;
    for (; a < r; ++a) {
      if (++idx[a] < weights[a].size()) break;
      idx[a] = 0;
    }
    if (a >= r) break;
  }
  if (!(den >= 1e-300)) throw NumericError("degenerate kernel sum at evaluation point");
  return base + num / den;
}

/// K_n evaluated at the cell centres of a grid of `out_shape` over the box.
inline GridFunction kantorovich_apply(const CellAverageTensor& cells, const DensityKernel& kernel,
                                      const std::vector<std::size_t>& out_shape) {
  GridFunction out = GridFunction::constant(cells.domain(), out_shape, 0.0);
  std::vector<double> values(out.size());
  parallel_for(out.size(), [&](std::size_t flat) {
    std::vector<double> point(out.dim());
    out.center(flat, point);
    values[flat] = kantorovich_eval(cells, kernel, point);
  });
  return GridFunction(cells.domain(), out_shape, std::move(values));
}

/// Coefficients of `field` followed by evaluation on a uniform grid.
template <class Field>
GridFunction kantorovich_apply_grid(Field&& field, const BoxDomain& domain, const DensityKernel& kernel, int n,
                                    int m, const std::vector<std::size_t>& out_shape,
                                    Placement placement = Placement::unit) {
  if (out_shape.size() != domain.dim()) throw ArgumentError("output shape and domain dimension differ");
  for (std::size_t s : out_shape) {
    if (s < 2) throw ArgumentError("output grid needs at least 2 points per axis");
  }
  const CellAverageTensor cells = cell_averages(std::forward<Field>(field), domain, n, m, placement);
  return kantorovich_apply(cells, kernel, out_shape);
}

}  // namespace kantnn
