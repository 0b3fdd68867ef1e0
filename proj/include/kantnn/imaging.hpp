#pragma once

// Image pipelines built on the Kantorovich operator: reconstruction,
// inpainting, scaling and denoising, plus the noise models, classical
// filters and synthetic fields used to exercise them.
//
// An h x w image is read as a step function on [0, 1]^2 with x along the
// columns and y along the rows; pixel (i, j) is addressed at the normalized
// coordinates x = j / (w - 1), y = i / (h - 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kantnn/error.hpp"
#include "kantnn/grid.hpp"
#include "kantnn/image.hpp"
#include "kantnn/kernels.hpp"
#include "kantnn/normspaces.hpp"
#include "kantnn/operator.hpp"
#include "kantnn/parallel.hpp"
#include "kantnn/rng.hpp"

namespace kantnn {

/// How a continuous coordinate picks a pixel.
enum class PixelAccess {
  floor,  ///< min(floor(t (h - 1)), h - 1): reconstruction, inpainting, denoising
  round,  ///< round(t (h - 1)): scaling
};

namespace detail {

inline std::size_t pixel_index(double t, std::size_t extent, PixelAccess access) {
  if (extent == 1) return 0;
  const double clamped = std::clamp(t, 0.0, 1.0);
  const double scaled = clamped * static_cast<double>(extent - 1);
  const double idx = access == PixelAccess::floor ? std::floor(scaled) : std::round(scaled);
  return std::min(static_cast<std::size_t>(idx), extent - 1);
}

inline double node(std::size_t i, std::size_t extent) {
  return extent == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(extent - 1);
}

inline void check_image(const Image& img) {
  if (img.empty()) throw ArgumentError("image is empty");
}

inline void check_operator_params(int n, int m) {
  if (n < 1) throw ArgumentError("n must be at least 1");
  if (m < 1) throw ArgumentError("m must be at least 1");
}

// Evaluates K_n at the normalized nodes of an out_h x out_w raster.
inline std::vector<double> evaluate_raster(const CellAverageTensor& cells, const DensityKernel& kernel,
                                           std::size_t out_h, std::size_t out_w) {
  std::vector<double> out(out_h * out_w);
  parallel_for(out_h, [&](std::size_t i) {
    double point[2];
    point[1] = node(i, out_h);
    for (std::size_t j = 0; j < out_w; ++j) {
      point[0] = node(j, out_w);
      out[i * out_w + j] = kantorovich_eval(cells, kernel, std::span<const double>(point, 2));
    }
  });
  return out;
}

}  // namespace detail

/// Step-function view of an image on [0, 1]^2 (point = {x, y}).
inline auto image_field(const Image& img, PixelAccess access) {
  return [&img, access](std::span<const double> p) {
    return img(detail::pixel_index(p[1], img.height(), access), detail::pixel_index(p[0], img.width(), access));
  };
}

/// Maps raw operator output into [0, 1]: identity (with clamping of
/// round-off) unless some value leaves [0, 1] by more than 1e-12, in which
/// case the values are min-max stretched.
inline void normalize_unit_range(std::vector<double>& values) {
  if (values.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo >= -1e-12 && hi <= 1.0 + 1e-12) {
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
    return;
  }
  if (hi > lo) {
    for (double& v : values) v = (v - lo) / (hi - lo);
  } else {
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  }
}

/// K_n applied to the image's step function at every pixel node.
inline Image reconstruct(const Image& img, const DensityKernel& kernel, int n, int m = kDefaultSubsamples) {
  detail::check_image(img);
  detail::check_operator_params(n, m);
  if (img.has_mask()) throw ArgumentError("reconstruct expects an unmasked image");
  const CellAverageTensor cells = cell_averages(image_field(img, PixelAccess::floor), BoxDomain::unit(2), n, m);
  std::vector<double> out = detail::evaluate_raster(cells, kernel, img.height(), img.width());
  normalize_unit_range(out);
  return Image(img.height(), img.width(), std::move(out));
}

/// Validity mask with exactly round(fraction * h * w) invalid pixels, taken
/// from the front of a seeded Fisher-Yates shuffle. true = valid.
inline std::vector<bool> make_mask(std::size_t height, std::size_t width, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("mask fraction must lie in [0, 1]");
  const std::size_t total = height * width;
  const auto removed = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  Rng rng(seed);
  const std::vector<std::size_t> order = shuffled_indices(total, rng);
  std::vector<bool> mask(total, true);
  for (std::size_t i = 0; i < removed; ++i) mask[order[i]] = false;
  return mask;
}

/// Fills invalid pixels with the operator built from valid samples only;
/// valid pixels are copied unchanged. The result carries no mask.
inline Image inpaint(const Image& img, const DensityKernel& kernel, int n, int m = kDefaultSubsamples) {
  detail::check_image(img);
  detail::check_operator_params(n, m);
  Image out(img.height(), img.width(), img.pixels());
  if (!img.has_mask()) return out;
  const auto& mask = img.mask();
  if (std::none_of(mask.begin(), mask.end(), [](bool v) { return v; })) {
    throw ArgumentError("mask leaves no valid pixel; nothing to inpaint from");
  }
  auto field = [&img](std::span<const double> p) -> std::optional<double> {
    const std::size_t row = detail::pixel_index(p[1], img.height(), PixelAccess::floor);
    const std::size_t col = detail::pixel_index(p[0], img.width(), PixelAccess::floor);
    if (!img.valid(row * img.width() + col)) return std::nullopt;
    return img(row, col);
  };
  const CellAverageTensor cells = cell_averages_masked(field, BoxDomain::unit(2), n, m);
  std::vector<std::size_t> holes;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!mask[i]) holes.push_back(i);
  }
  std::vector<double> estimates(holes.size());
  parallel_for(holes.size(), [&](std::size_t h) {
    const std::size_t row = holes[h] / img.width();
    const std::size_t col = holes[h] % img.width();
    const double point[2] = {detail::node(col, img.width()), detail::node(row, img.height())};
    estimates[h] = std::clamp(kantorovich_eval(cells, kernel, std::span<const double>(point, 2)), 0.0, 1.0);
  });
  for (std::size_t h = 0; h < holes.size(); ++h) out[holes[h]] = estimates[h];
  return out;
}

/// Evaluates the operator on a raster `factor` times finer per axis.
inline Image upscale(const Image& img, const DensityKernel& kernel, int n, int m, int factor) {
  detail::check_image(img);
  detail::check_operator_params(n, m);
  if (factor < 1) throw ArgumentError("scale factor must be at least 1");
  if (img.has_mask()) throw ArgumentError("upscale expects an unmasked image");
  const CellAverageTensor cells = cell_averages(image_field(img, PixelAccess::round), BoxDomain::unit(2), n, m);
  const std::size_t out_h = img.height() * static_cast<std::size_t>(factor);
  const std::size_t out_w = img.width() * static_cast<std::size_t>(factor);
  std::vector<double> out = detail::evaluate_raster(cells, kernel, out_h, out_w);
  normalize_unit_range(out);
  return Image(out_h, out_w, std::move(out));
}

/// Keeps every factor-th pixel starting at index factor - 1 on each axis.
inline Image downsample(const Image& img, int factor) {
  detail::check_image(img);
  if (factor < 1) throw ArgumentError("downsample factor must be at least 1");
  const auto s = static_cast<std::size_t>(factor);
  if (s > img.height() || s > img.width()) throw ArgumentError("downsample factor exceeds an image dimension");
  const std::size_t out_h = img.height() / s;
  const std::size_t out_w = img.width() / s;
  Image out(out_h, out_w);
  for (std::size_t i = 0; i < out_h; ++i) {
    for (std::size_t j = 0; j < out_w; ++j) out(i, j) = img((i + 1) * s - 1, (j + 1) * s - 1);
  }
  return out;
}

/// Noise model with its own seeded stream.
struct NoiseSpec {
  enum class Kind { impulse_white, salt_pepper, gaussian };
  Kind kind = Kind::impulse_white;
  double amount = 0.0;  ///< density for impulse kinds, sigma for gaussian
  std::uint64_t seed = 0;

  /// Parses "impulse:<d>", "salt_pepper:<d>" or "gaussian:<sigma>".
  static NoiseSpec parse(std::string_view token, std::uint64_t seed) {
    const auto parts = detail::split(token, ':');
    if (parts.size() != 2) throw ConfigError("noise token must be <kind>:<value>, got '" + std::string(token) + "'");
    NoiseSpec spec;
    spec.seed = seed;
    spec.amount = detail::parse_real(parts[1], "noise amount");
    if (parts[0] == "impulse" || parts[0] == "impulse_white") {
      spec.kind = Kind::impulse_white;
    } else if (parts[0] == "salt_pepper" || parts[0] == "saltpepper") {
      spec.kind = Kind::salt_pepper;
    } else if (parts[0] == "gaussian") {
      spec.kind = Kind::gaussian;
    } else {
      throw ConfigError("unknown noise kind '" + parts[0] + "'");
    }
    spec.validate();
    return spec;
  }

  void validate() const {
    if (kind == Kind::gaussian) {
      if (!(amount >= 0.0)) throw ConfigError("gaussian sigma must be >= 0");
    } else if (!(amount >= 0.0 && amount <= 1.0)) {
      throw ConfigError("noise density must lie in [0, 1]");
    }
  }
};

namespace detail {

// Impulse positions in row-major order.
inline std::vector<std::size_t> impulse_positions(std::size_t total, double density, Rng& rng) {
  const auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(total)));
  std::vector<std::size_t> order = shuffled_indices(total, rng);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

inline Image add_noise(const Image& img, const NoiseSpec& spec) {
  detail::check_image(img);
  spec.validate();
  Image out(img.height(), img.width(), img.pixels());
  Rng rng(spec.seed);
  switch (spec.kind) {
    case NoiseSpec::Kind::impulse_white:
      for (std::size_t i : detail::impulse_positions(img.size(), spec.amount, rng)) out[i] = 1.0;
      break;
    case NoiseSpec::Kind::salt_pepper:
      for (std::size_t i : detail::impulse_positions(img.size(), spec.amount, rng)) out[i] = rng.coin() ? 1.0 : 0.0;
      break;
    case NoiseSpec::Kind::gaussian:
      if (spec.amount == 0.0) break;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i] + spec.amount * rng.normal(), 0.0, 1.0);
      break;
  }
  return out;
}

/// Additive N(0, sigma^2) noise on a grid function, no clamping.
inline GridFunction add_gaussian_noise(const GridFunction& g, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ArgumentError("gaussian sigma must be >= 0");
  std::vector<double> v(g.values().begin(), g.values().end());
  if (sigma > 0.0) {
    Rng rng(seed);
    for (double& x : v) x += sigma * rng.normal();
  }
  return GridFunction(g.domain(), g.shape(), std::move(v));
}

/// Same structure as reconstruct, applied to a noisy observation.
inline Image denoise(const Image& noisy, const DensityKernel& kernel, int n, int m = kDefaultSubsamples) {
  return reconstruct(noisy, kernel, n, m);
}

/// The peaks surface.
inline double peaks(double x, double y) {
  return 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0)) -
         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y) -
         std::exp(-(x + 1.0) * (x + 1.0) - y * y) / 3.0;
}

/// peaks sampled at grid x grid equispaced nodes of [-3, 3]^2 (corners
/// included). The returned grid's cells are centred on those nodes.
inline GridFunction peaks_field(std::size_t grid) {
  if (grid < 2) throw ArgumentError("peaks grid needs at least 2 points per axis");
  const double h = 6.0 / static_cast<double>(grid - 1);
  std::vector<double> values(grid * grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double y = -3.0 + h * static_cast<double>(i);
    for (std::size_t j = 0; j < grid; ++j) values[i * grid + j] = peaks(-3.0 + h * static_cast<double>(j), y);
  }
  return GridFunction(BoxDomain::cube(2, -3.0 - 0.5 * h, 3.0 + 0.5 * h), {grid, grid}, std::move(values));
}

/// Classical smoothing filter used as a baseline denoiser.
struct FilterSpec {
  enum class Kind { gaussian, median };
  Kind kind = Kind::gaussian;
  double sigma = 1.0;
  int window = 3;

  static FilterSpec gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ArgumentError("gaussian filter sigma must be positive");
    return {Kind::gaussian, sigma, 0};
  }
  static FilterSpec median(int window) {
    if (window < 3 || window % 2 == 0) throw ArgumentError("median window must be odd and >= 3");
    return {Kind::median, 0.0, window};
  }

  /// Parses "gaussian:<sigma>" or "median:<window>".
  static FilterSpec parse(std::string_view token) {
    const auto parts = detail::split(token, ':');
    if (parts.size() == 2 && parts[0] == "gaussian") return gaussian(detail::parse_real(parts[1], "filter sigma"));
    if (parts.size() == 2 && parts[0] == "median") {
      const double w = detail::parse_real(parts[1], "median window");
      if (w != std::floor(w)) throw ConfigError("median window must be an integer");
      return median(static_cast<int>(w));
    }
    throw ConfigError("unknown filter '" + std::string(token) + "' (expected gaussian:<sigma> or median:<window>)");
  }
};

namespace detail {

// Filters a rows x cols raster with replicate padding.
inline std::vector<double> filter_raster(const std::vector<double>& in, std::size_t rows, std::size_t cols,
                                         const FilterSpec& spec) {
  auto clampi = [](long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
  };
  std::vector<double> out(in.size());
  if (spec.kind == FilterSpec::Kind::gaussian) {
    if (!(spec.sigma > 0.0)) throw ArgumentError("gaussian filter sigma must be positive");
    const long radius = static_cast<long>(std::ceil(3.0 * spec.sigma));
    std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long i = -radius; i <= radius; ++i) {
      const double v = std::exp(-static_cast<double>(i * i) / (2.0 * spec.sigma * spec.sigma));
      w[static_cast<std::size_t>(i + radius)] = v;
      total += v;
    }
    for (double& v : w) v /= total;
    std::vector<double> tmp(in.size());
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        double s = 0.0;
        for (long i = -radius; i <= radius; ++i) {
          s += w[static_cast<std::size_t>(i + radius)] * in[r * cols + clampi(static_cast<long>(c) + i, cols)];
        }
        tmp[r * cols + c] = s;
      }
    }
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        double s = 0.0;
        for (long i = -radius; i <= radius; ++i) {
          s += w[static_cast<std::size_t>(i + radius)] * tmp[clampi(static_cast<long>(r) + i, rows) * cols + c];
        }
        out[r * cols + c] = s;
      }
    }
    return out;
  }
  if (spec.window < 3 || spec.window % 2 == 0) throw ArgumentError("median window must be odd and >= 3");
  const long half = spec.window / 2;
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(spec.window * spec.window));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      window.clear();
      for (long di = -half; di <= half; ++di) {
        for (long dj = -half; dj <= half; ++dj) {
          window.push_back(in[clampi(static_cast<long>(r) + di, rows) * cols + clampi(static_cast<long>(c) + dj, cols)]);
        }
      }
      auto mid = window.begin() + static_cast<long>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out[r * cols + c] = *mid;
    }
  }
  return out;
}

}  // namespace detail

inline Image spatial_filter(const Image& img, const FilterSpec& spec) {
  detail::check_image(img);
  return Image(img.height(), img.width(), detail::filter_raster(img.pixels(), img.height(), img.width(), spec));
}

inline GridFunction spatial_filter(const GridFunction& g, const FilterSpec& spec) {
  if (g.dim() != 2) throw ArgumentError("spatial filters need a two-dimensional grid");
  std::vector<double> v(g.values().begin(), g.values().end());
  return GridFunction(g.domain(), g.shape(), detail::filter_raster(v, g.shape()[1], g.shape()[0], spec));
}

enum class ExampleFunction { example1, example2 };

inline ExampleFunction parse_example(std::string_view token) {
  if (token == "example1") return ExampleFunction::example1;
  if (token == "example2") return ExampleFunction::example2;
  throw ConfigError("unknown function '" + std::string(token) + "' (expected example1 or example2)");
}

/// Closed-form test surfaces on [0, 1]^2.
inline std::function<double(std::span<const double>)> example_field(ExampleFunction which) {
  if (which == ExampleFunction::example1) {
    return [](std::span<const double> u) {
      const double a = (u[0] - 0.3) * (u[0] - 0.3) + (u[1] - 0.5) * (u[1] - 0.5);
      const double b = (u[0] - 0.7) * (u[0] - 0.7) + (u[1] - 0.5) * (u[1] - 0.5);
      return std::exp(-70.0 * a) + std::exp(-70.0 * b);
    };
  }
  return [](std::span<const double> u) {
    const double r = std::hypot(u[0] - 0.5, u[1] - 0.5);
    return std::sin(15.0 * r) / (1.0 + 10.0 * r);
  };
}

/// One row of the diagonal-vs-mixed error comparison.
struct NormComparisonRow {
  double p1 = 0.0;
  double diagonal = 0.0;   ///< L^(p1,p1)
  double mixed_next = 0.0; ///< L^(p1,p1+1)
  double mixed_far = 0.0;  ///< L^(p1,p1+2)
};

/// Errors between two rasters measured with one unit cell per sample.
inline std::vector<NormComparisonRow> compare_norms(const GridFunction& clean, const GridFunction& processed,
                                                    const std::vector<double>& p1_list) {
  if (clean.shape() != processed.shape()) throw ArgumentError("grid functions differ in shape");
  if (clean.dim() != 2) throw ArgumentError("norm comparison expects two-dimensional data");
  const BoxDomain cells = pixel_domain(clean.shape());
  const GridFunction error = difference(clean.with_domain(cells), processed.with_domain(cells));
  std::vector<NormComparisonRow> rows;
  for (double p1 : p1_list) {
    NormComparisonRow row;
    row.p1 = p1;
    row.diagonal = mixed_lebesgue_norm(error, MixedExponents{p1, p1});
    row.mixed_next = mixed_lebesgue_norm(error, MixedExponents{p1, p1 + 1.0});
    row.mixed_far = mixed_lebesgue_norm(error, MixedExponents{p1, p1 + 2.0});
    rows.push_back(row);
  }
  return rows;
}

/// Deterministic grayscale test scene: a smooth gradient with a bump, a
/// shaded disk, a dark rectangle, a textured patch and seeded film grain.
inline Image synthetic_scene(std::size_t size, std::uint64_t seed) {
  if (size < 8) throw ArgumentError("synthetic scene needs at least 8 pixels per side");
  Rng rng(seed);
  std::vector<double> grain(size * size);
  for (double& v : grain) v = rng.normal();
  grain = detail::filter_raster(grain, size, size, FilterSpec::gaussian(1.0));
  double mean = 0.0;
  for (double v : grain) mean += v;
  mean /= static_cast<double>(grain.size());
  double var = 0.0;
  for (double v : grain) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(grain.size()));

  constexpr double two_pi = 6.283185307179586;
  Image img(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    const double y = detail::node(i, size);
    for (std::size_t j = 0; j < size; ++j) {
      const double x = detail::node(j, size);
      double v = 0.25 + 0.35 * x + 0.15 * y;
      v += 0.25 * std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.35) * (y - 0.35)) / 0.02);
      const double d = std::hypot(x - 0.68, y - 0.62);
      if (d < 0.18) v = 0.85 - 0.6 * d;
      if (x > 0.12 && x < 0.42 && y > 0.65 && y < 0.88) v = 0.15;
      if (y < 0.45 && x > 0.55) v += 0.08 * std::sin(two_pi * 9.0 * x) * std::sin(two_pi * 7.0 * y);
      v += 0.08 * grain[i * size + j] / sd;
      img(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace kantnn
