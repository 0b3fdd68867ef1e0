#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kantnn/error.hpp"
#include "kantnn/grid.hpp"

namespace kantnn {

/// Grayscale raster, row-major, intensities in [0, 1]. An optional mask
/// marks valid pixels (true = valid).
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, double fill = 0.0)
      : height_(height), width_(width), pixels_(height * width, fill) {
    if (height == 0 || width == 0) throw ArgumentError("image dimensions must be positive");
  }
  Image(std::size_t height, std::size_t width, std::vector<double> pixels)
      : height_(height), width_(width), pixels_(std::move(pixels)) {
    if (height == 0 || width == 0) throw ArgumentError("image dimensions must be positive");
    if (pixels_.size() != height * width) throw ArgumentError("pixel count does not match image dimensions");
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  double operator[](std::size_t flat) const { return pixels_[flat]; }
  double& operator[](std::size_t flat) { return pixels_[flat]; }
  const std::vector<double>& pixels() const { return pixels_; }

  bool has_mask() const { return mask_.has_value(); }
  const std::vector<bool>& mask() const { return *mask_; }
  bool valid(std::size_t flat) const { return !mask_ || (*mask_)[flat]; }
  void set_mask(std::vector<bool> mask) {
    if (mask.size() != pixels_.size()) throw ArgumentError("mask size does not match image");
    mask_ = std::move(mask);
  }
  void clear_mask() { mask_.reset(); }

  bool same_size(const Image& other) const { return height_ == other.height_ && width_ == other.width_; }

  /// Samples as a grid function with one unit cell per pixel
  /// (axis 1 = columns, axis 2 = rows).
  GridFunction to_grid() const {
    return GridFunction(pixel_domain({width_, height_}), {width_, height_}, pixels_);
  }

  static Image from_grid(const GridFunction& g) {
    if (g.dim() != 2) throw ArgumentError("only two-dimensional grids convert to images");
    return Image(g.shape()[1], g.shape()[0], std::vector<double>(g.values().begin(), g.values().end()));
  }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
  std::optional<std::vector<bool>> mask_;
};

}  // namespace kantnn
