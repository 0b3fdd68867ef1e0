#pragma once

// Full-reference image quality: MSE, PSNR and single-window SSIM
//
//   SSIM = (2 mu_a mu_b + d1)(2 cov + d2) / ((mu_a^2 + mu_b^2 + d1)(var_a + var_b + d2))
//
// with d1 = (0.01 L)^2, d2 = (0.03 L)^2 and population (1/N) moments over
// the whole image.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "kantnn/error.hpp"
#include "kantnn/image.hpp"

namespace kantnn {

struct QualityReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

namespace detail {
inline void check_same(const Image& a, const Image& b) {
  if (!a.same_size(b)) throw ArgumentError("images differ in dimensions");
  if (a.empty()) throw ArgumentError("images are empty");
}
}  // namespace detail

inline double mse(const Image& a, const Image& b) {
  detail::check_same(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

/// PSNR in dB for a given MSE; +inf when mse == 0.
inline double psnr_from_mse(double mse_value, double max_value = 1.0) {
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse_value);
}

inline double psnr(const Image& a, const Image& b, double max_value = 1.0) {
  if (!(max_value > 0.0)) throw ArgumentError("PSNR peak value must be positive");
  return psnr_from_mse(mse(a, b), max_value);
}

inline double ssim_global(const Image& a, const Image& b, double L = 1.0) {
  detail::check_same(a, b);
  if (!(L > 0.0)) throw ArgumentError("SSIM dynamic range must be positive");
  const double d1 = (0.01 * L) * (0.01 * L);
  const double d2 = (0.03 * L) * (0.03 * L);
  const double count = static_cast<double>(a.size());
  double mu_a = 0.0, mu_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mu_a += a[i];
    mu_b += b[i];
  }
  mu_a /= count;
  mu_b /= count;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mu_a;
    const double db = b[i] - mu_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= count;
  var_b /= count;
  cov /= count;
  return ((2.0 * mu_a * mu_b + d1) * (2.0 * cov + d2)) /
         ((mu_a * mu_a + mu_b * mu_b + d1) * (var_a + var_b + d2));
}

inline QualityReport quality(const Image& reference, const Image& test, double max_value = 1.0) {
  QualityReport r;
  r.mse = mse(reference, test);
  r.psnr_db = psnr_from_mse(r.mse, max_value);
  r.ssim = ssim_global(reference, test, max_value);
  return r;
}

/// "%.6g" with the token "inf" for +infinity.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// One CSV row "mse,psnr_db,ssim".
inline std::string to_csv_row(const QualityReport& r) {
  return format_number(r.mse) + "," + format_number(r.psnr_db) + "," + format_number(r.ssim);
}

}  // namespace kantnn
