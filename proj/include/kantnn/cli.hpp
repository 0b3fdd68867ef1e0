#pragma once

// Command-line front end. `run_cli` is the whole program minus main(), so
// tests can drive it in-process.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or validation failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kantnn/error.hpp"
#include "kantnn/grid.hpp"
#include "kantnn/image.hpp"
#include "kantnn/imaging.hpp"
#include "kantnn/io.hpp"
#include "kantnn/kernels.hpp"
#include "kantnn/metrics.hpp"
#include "kantnn/normspaces.hpp"
#include "kantnn/operator.hpp"

namespace kantnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Parses "10,20,30" into positive integers.
inline std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& part : detail::split(text, ',')) {
    const double v = detail::parse_real(part, what);
    if (v != std::floor(v) || v < 1 || v > 1e6) throw ConfigError(std::string(what) + " must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& part : detail::split(text, ',')) out.push_back(detail::parse_real(part, what));
  return out;
}

/// Splits on ';' and drops empty pieces.
inline std::vector<std::string> split_groups(const std::string& text) {
  std::vector<std::string> out;
  for (auto& part : detail::split(text, ';')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

struct ApproxOptions {
  std::string function;
  std::string kernel = "tanh";
  std::string n_list = "10,20,30,40";
  int m = kDefaultSubsamples;
  int grid = 128;
  std::string norms;
  std::string orlicz;
  double lambda = 1.0;
  std::string out;
};

struct ImageOptions {
  std::string task;
  std::string input;
  std::string output;
  std::string metrics_out;
  std::string kernel = "logistic";
  int n = 50;
  int m = kDefaultSubsamples;
  double mask_fraction = 0.21;
  std::uint64_t seed = 0;
  std::string noise = "impulse:0.05";
  int factor = 2;
  std::string format = "P5";
};

struct CompareOptions {
  std::string source = "peaks";
  std::string input;
  int grid = 148;
  std::string noise;
  std::string filter;
  std::string p1_list = "2,3,4,5,6,7,8";
  std::uint64_t seed = 0;
  std::string out;
};

struct SynthOptions {
  int size = 128;
  std::uint64_t seed = 7;
  std::string output;
  std::string format = "P5";
};

namespace detail {

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    kantnn::detail::write_file(path, text);
  }
}

inline PgmFormat parse_format(const std::string& token) {
  if (token == "P2") return PgmFormat::P2;
  if (token == "P5") return PgmFormat::P5;
  throw ConfigError("PGM format must be P2 or P5");
}

}  // namespace detail

/// Error table of K_n f against a closed-form field on a cell-centred grid.
inline std::string approx_table(const ApproxOptions& o, std::ostream& warn) {
  const ExampleFunction which = parse_example(o.function);
  const DensityKernel kernel = DensityKernel::parse(o.kernel);
  const std::vector<int> ns = parse_int_list(o.n_list, "n");
  if (o.m < 1) throw ConfigError("m must be at least 1");
  if (o.grid < 2) throw ConfigError("grid must be at least 2");
  if (!(o.lambda > 0.0) || !std::isfinite(o.lambda)) throw ConfigError("lambda must be positive");
  std::vector<MixedExponents> norms;
  for (const auto& g : split_groups(o.norms)) {
    norms.push_back(MixedExponents::parse(g));
    if (norms.back().size() != 2) throw ConfigError("exponent tuples must have 2 entries for planar examples");
    if (norms.back()[1] < norms.back()[0]) warn << "warning: exponent tuple (" << g << ") is decreasing\n";
  }
  std::vector<OrliczVector> phis;
  for (const auto& g : split_groups(o.orlicz)) {
    phis.push_back(OrliczVector::parse(g));
    if (phis.back().size() != 2) throw ConfigError("Orlicz vectors must have 2 entries for planar examples");
  }

  std::vector<std::string> columns = {"n", "Max absolute error"};
  for (const auto& P : norms) columns.push_back("Mixed L^{" + P.label() + "}-error");
  for (const auto& Phi : phis) columns.push_back("Modular error [" + Phi.label() + "]");

  const auto field = example_field(which);
  const BoxDomain box = BoxDomain::unit(2);
  const std::vector<std::size_t> shape = {static_cast<std::size_t>(o.grid), static_cast<std::size_t>(o.grid)};
  const GridFunction exact = GridFunction::sample(box, shape, field);
  std::vector<std::vector<TableCell>> rows;
  for (int n : ns) {
    const GridFunction approx = kantorovich_apply_grid(field, box, kernel, n, o.m, shape);
    const GridFunction err = difference(exact, approx);
    std::vector<TableCell> row = {static_cast<double>(n), sup_error(exact, approx)};
    for (const auto& P : norms) row.emplace_back(mixed_lebesgue_norm(err, P));
    for (const auto& Phi : phis) row.emplace_back(mixed_orlicz_modular(err, Phi, o.lambda).value);
    rows.push_back(std::move(row));
  }
  return format_table(columns, rows);
}

inline void run_image(const ImageOptions& o, std::ostream& out) {
  const DensityKernel kernel = DensityKernel::parse(o.kernel);
  const PgmFormat format = detail::parse_format(o.format);
  if (o.n < 1) throw ConfigError("n must be at least 1");
  if (o.m < 1) throw ConfigError("m must be at least 1");
  std::optional<NoiseSpec> noise;
  if (o.task == "denoise") noise = NoiseSpec::parse(o.noise, o.seed);
  if (o.task == "inpaint" && !(o.mask_fraction >= 0.0 && o.mask_fraction <= 1.0)) {
    throw ConfigError("mask fraction must lie in [0, 1]");
  }
  if (o.task == "scale" && o.factor < 1) throw ConfigError("factor must be at least 1");

  const Image clean = load_pgm(o.input);
  std::vector<std::vector<TableCell>> rows;
  auto add_row = [&](const std::string& stage, const Image& test) {
    const QualityReport q = quality(clean, test);
    rows.push_back({o.task, stage, static_cast<double>(o.n), q.mse, q.psnr_db, q.ssim});
  };

  Image result;
  if (o.task == "reconstruct") {
    result = reconstruct(clean, kernel, o.n, o.m);
    add_row("output", result);
  } else if (o.task == "inpaint") {
    Image masked = clean;
    masked.set_mask(make_mask(clean.height(), clean.width(), o.mask_fraction, o.seed));
    result = inpaint(masked, kernel, o.n, o.m);
    add_row("output", result);
  } else if (o.task == "scale") {
    result = upscale(clean, kernel, o.n, o.m, o.factor);
    add_row("downsampled", downsample(result, o.factor));
  } else if (o.task == "denoise") {
    const Image noisy = add_noise(clean, *noise);
    add_row("noisy", noisy);
    result = denoise(noisy, kernel, o.n, o.m);
    add_row("output", result);
  } else {
    throw ConfigError("unknown image task '" + o.task + "'");
  }
  if (!o.output.empty()) save_pgm(result, o.output, format);
  const std::string table = format_table({"task", "stage", "n", "MSE", "PSNR (dB)", "SSIM"}, rows);
  detail::emit(table, o.metrics_out, out);
}

inline std::string compare_table(const CompareOptions& o) {
  const std::vector<double> p1 = parse_real_list(o.p1_list, "p1");
  for (double p : p1) {
    if (!(p >= 1.0)) throw ConfigError("p1 values must be >= 1");
  }
  std::vector<NormComparisonRow> result;
  if (o.source == "peaks") {
    const NoiseSpec noise = NoiseSpec::parse(o.noise.empty() ? "gaussian:0.3" : o.noise, o.seed);
    if (noise.kind != NoiseSpec::Kind::gaussian) throw ConfigError("the peaks source takes gaussian noise only");
    const FilterSpec filter = FilterSpec::parse(o.filter.empty() ? "gaussian:1" : o.filter);
    if (o.grid < 2) throw ConfigError("grid must be at least 2");
    const GridFunction clean = peaks_field(static_cast<std::size_t>(o.grid));
    const GridFunction noisy = add_gaussian_noise(clean, noise.amount, noise.seed);
    result = compare_norms(clean, spatial_filter(noisy, filter), p1);
  } else if (o.source == "image") {
    const NoiseSpec noise = NoiseSpec::parse(o.noise.empty() ? "salt_pepper:0.05" : o.noise, o.seed);
    const FilterSpec filter = FilterSpec::parse(o.filter.empty() ? "median:3" : o.filter);
    if (o.input.empty()) throw ConfigError("--input is required for the image source");
    const Image clean = load_pgm(o.input);
    const Image filtered = spatial_filter(add_noise(clean, noise), filter);
    result = compare_norms(clean.to_grid(), filtered.to_grid(), p1);
  } else {
    throw ConfigError("unknown source '" + o.source + "' (expected peaks or image)");
  }
  std::vector<std::vector<TableCell>> rows;
  for (const auto& r : result) rows.push_back({r.p1, r.diagonal, r.mixed_next, r.mixed_far});
  return format_table({"p1", "L^(p1,p1)", "L^(p1,p1+1)", "L^(p1,p1+2)"}, rows);
}

/// Runs the program; never throws.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Kantorovich-type neural network operators: approximation, norms and image pipelines", "kantnn"};
  app.require_subcommand(1);

  ApproxOptions approx;
  auto* a = app.add_subcommand("approx", "error table of K_n f for a closed-form test field");
  a->add_option("--function", approx.function, "example1 | example2")->required();
  a->add_option("--kernel", approx.kernel, "logistic | tanh | ramp | bspline:<order>")->capture_default_str();
  a->add_option("--n", approx.n_list, "comma-separated n values")->capture_default_str();
  a->add_option("--m", approx.m, "subsamples per cell axis")->capture_default_str();
  a->add_option("--grid", approx.grid, "evaluation grid points per axis")->capture_default_str();
  a->add_option("--norms", approx.norms, "exponent tuples, ';'-separated, e.g. 2,3;4,6");
  a->add_option("--orlicz", approx.orlicz, "Orlicz vectors, ';'-separated, e.g. exp:2,log:2:1.7");
  a->add_option("--lambda", approx.lambda, "modular scale")->capture_default_str();
  a->add_option("--out", approx.out, "CSV path (stdout if omitted)");

  ImageOptions image;
  auto* im = app.add_subcommand("image", "image reconstruction, inpainting, scaling and denoising");
  im->add_option("task", image.task, "reconstruct | inpaint | scale | denoise")
      ->required()
      ->check(CLI::IsMember({"reconstruct", "inpaint", "scale", "denoise"}));
  im->add_option("--input", image.input, "input PGM")->required();
  im->add_option("--output", image.output, "output PGM");
  im->add_option("--metrics-out", image.metrics_out, "metrics CSV path (stdout if omitted)");
  im->add_option("--kernel", image.kernel)->capture_default_str();
  im->add_option("--n", image.n)->capture_default_str();
  im->add_option("--m", image.m)->capture_default_str();
  im->add_option("--mask-fraction", image.mask_fraction, "inpaint: fraction of removed pixels")->capture_default_str();
  im->add_option("--seed", image.seed)->capture_default_str();
  im->add_option("--noise", image.noise, "denoise: impulse:<d> | salt_pepper:<d> | gaussian:<sigma>")
      ->capture_default_str();
  im->add_option("--factor", image.factor, "scale: upsampling factor")->capture_default_str();
  im->add_option("--format", image.format, "P2 | P5")->capture_default_str();

  CompareOptions compare;
  auto* c = app.add_subcommand("compare-norms", "diagonal vs mixed error norms after filtering a noisy signal");
  c->add_option("--source", compare.source, "peaks | image")->capture_default_str();
  c->add_option("--input", compare.input, "input PGM for the image source");
  c->add_option("--grid", compare.grid, "peaks grid size")->capture_default_str();
  c->add_option("--noise", compare.noise, "gaussian:<sigma> (peaks) or salt_pepper:<d> etc. (image)");
  c->add_option("--filter", compare.filter, "gaussian:<sigma> | median:<window>");
  c->add_option("--p1", compare.p1_list, "comma-separated p1 values")->capture_default_str();
  c->add_option("--seed", compare.seed)->capture_default_str();
  c->add_option("--out", compare.out, "CSV path (stdout if omitted)");

  SynthOptions synth;
  auto* s = app.add_subcommand("synth-image", "write the deterministic synthetic test image");
  s->add_option("--size", synth.size)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--output", synth.output, "output PGM")->required();
  s->add_option("--format", synth.format, "P2 | P5")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (a->parsed()) {
      detail::emit(approx_table(approx, err), approx.out, out);
    } else if (im->parsed()) {
      run_image(image, out);
    } else if (c->parsed()) {
      detail::emit(compare_table(compare), compare.out, out);
    } else if (s->parsed()) {
      if (synth.size < 8) throw ConfigError("size must be at least 8");
      const PgmFormat format = detail::parse_format(synth.format);
      save_pgm(synthetic_scene(static_cast<std::size_t>(synth.size), synth.seed), synth.output, format);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace kantnn::cli
