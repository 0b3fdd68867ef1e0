// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kantnn/kantnn.hpp"
#include "oracles.hpp"

using namespace kantnn;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<DensityKernel> every_kernel() {
  return {DensityKernel(SigmoidKind::logistic()),  DensityKernel(SigmoidKind::tanh()),
          DensityKernel(SigmoidKind::ramp()),      DensityKernel(SigmoidKind::bspline(1)),
          DensityKernel(SigmoidKind::bspline(2)),  DensityKernel(SigmoidKind::bspline(3)),
          DensityKernel(SigmoidKind::bspline(4))};
}

GridFunction random_grid(Rng& rng, std::size_t nx, std::size_t ny, const BoxDomain& box) {
  std::vector<double> v(nx * ny);
  for (double& x : v) x = -1.0 + 2.0 * rng.uniform();
  return GridFunction(box, {nx, ny}, std::move(v));
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + "]";
}

// ---------------------------------------------------------------------------

Outcome kernel_laws() {
  Outcome o;
  Rng rng(101);
  double worst_compact = 0.0, worst_truncated = 0.0, worst_mass = 0.0;
  for (const auto& k : every_kernel()) {
    const int K = k.compact() ? static_cast<int>(std::ceil(k.support_radius())) + 1
                              : static_cast<int>(std::ceil(k.tail_cutoff()));
    for (int i = 0; i < 100; ++i) {
      const double x = -1.0 + 2.0 * rng.uniform();
      double s = 0.0;
      for (int j = -K; j <= K; ++j) s += k(x - j);
      double& worst = k.compact() ? worst_compact : worst_truncated;
      worst = std::max(worst, std::fabs(s - 1.0));
    }
    worst_mass = std::max(worst_mass, std::fabs(density_l1(k, 4096) - 1.0));
  }
  o.require(worst_compact <= 1e-9, "partition of unity (compact) " + fmt("%.2e", worst_compact));
  o.require(worst_truncated <= 1e-6, "partition of unity (truncated) " + fmt("%.2e", worst_truncated));
  o.require(worst_mass <= 1e-6, "unit mass " + fmt("%.2e", worst_mass));
  o.note(fmt("max |sum-1| compact %.1e, truncated %.1e, max |mass-1| %.1e", worst_compact, worst_truncated,
             worst_mass));
  return o;
}

Outcome operator_oracle() {
  Outcome o;
  Rng rng(102);
  const auto kernels = every_kernel();
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int r = 1 + t % 2;
    const int n = 1 + static_cast<int>(rng.uniform_int(3));
    const auto& k = kernels[static_cast<std::size_t>(t) % kernels.size()];
    oracle::Coeffs ref;
    ref.n = n;
    ref.r = r;
    const std::size_t size = r == 1 ? 2 * n : 4 * n * n;
    for (std::size_t i = 0; i < size; ++i) ref.a.push_back(-5.0 + 10.0 * rng.uniform());
    const CellAverageTensor cells(BoxDomain::unit(static_cast<std::size_t>(r)), n, ref.a);
    for (int s = 0; s < 20; ++s) {
      const double p[] = {rng.uniform(), rng.uniform()};
      const double got = kantorovich_eval(cells, k, std::span<const double>(p, static_cast<std::size_t>(r)));
      worst = std::max(worst, std::fabs(got - oracle::kantorovich(ref, k, p[0], p[1])));
    }
  }
  // End-to-end with subsampled coefficients, m in {1, 2}.
  auto f = [](double x, double y) { return std::cos(4.0 * x) * std::exp(y); };
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 2; ++m) {
      const auto ref = oracle::cell_averages_2d(f, n, m);
      const auto cells =
          cell_averages([&](std::span<const double> u) { return f(u[0], u[1]); }, BoxDomain::unit(2), n, m);
      for (const auto& k : kernels) {
        for (int s = 0; s < 10; ++s) {
          const double p[] = {rng.uniform(), rng.uniform()};
          worst = std::max(worst, std::fabs(kantorovich_eval(cells, k, p) - oracle::kantorovich(ref, k, p[0], p[1])));
        }
      }
    }
  }
  o.require(worst <= 1e-12, "oracle agreement " + fmt("%.2e", worst));
  o.note(fmt("max deviation from naive sum %.1e", worst));
  return o;
}

Outcome constants_and_range() {
  Outcome o;
  Rng rng(103);
  const auto kernels = every_kernel();
  double worst_const = 0.0;
  for (const auto& k : kernels) {
    for (int n : {2, 8, 32}) {
      for (int t = 0; t < 20; ++t) {
        const double c = -10.0 + 20.0 * rng.uniform();
        const auto cells = cell_averages([c](std::span<const double>) { return c; }, BoxDomain::unit(2), n, 1);
        for (int s = 0; s < 5; ++s) {
          const double p[] = {rng.uniform(), rng.uniform()};
          worst_const = std::max(worst_const, std::fabs(kantorovich_eval(cells, k, p) - c));
        }
      }
    }
  }
  double worst_excess = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t side = 3 + rng.uniform_int(6);
    std::vector<double> vals(side * side);
    for (double& v : vals) v = -4.0 + 8.0 * rng.uniform();
    const GridFunction field(BoxDomain::unit(2), {side, side}, vals);
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    const auto& k = kernels[static_cast<std::size_t>(t) % kernels.size()];
    const auto cells = cell_averages(field, BoxDomain::unit(2), 1 + static_cast<int>(rng.uniform_int(15)), 2);
    for (int s = 0; s < 1000; ++s) {
      const double p[] = {rng.uniform(), rng.uniform()};
      const double v = kantorovich_eval(cells, k, p);
      worst_excess = std::max({worst_excess, *lo - v, v - *hi});
    }
  }
  o.require(worst_const <= 1e-10, "constant reproduction " + fmt("%.2e", worst_const));
  o.require(worst_excess <= 1e-10, "range preservation " + fmt("%.2e", worst_excess));
  o.note(fmt("max |K c - c| %.1e, max range excess %.1e", worst_const, std::max(0.0, worst_excess)));
  return o;
}

Outcome boundedness_bounds() {
  Outcome o;
  const DensityKernel k(SigmoidKind::tanh());
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  const int n = 16;
  const std::vector<std::size_t> shape = {32, 32};
  const double lebesgue_const = std::pow(density_l1(k, 4096) / k.psi_at_2(), 0.5 + 1.0 / 3.0);
  const double lambda_prime = 1.0 / (k.psi_at_2() * k.psi_at_2());
  const OrliczVector Phi{OrliczFunction::power(2), OrliczFunction::power(1.5)};
  Rng rng(104);
  double worst_ratio = 0.0, worst_modular_ratio = 0.0;
  int lebesgue_fail = 0, modular_fail = 0;
  for (int t = 0; t < 100; ++t) {
    const GridFunction f = random_grid(rng, shape[0], shape[1], box);
    const GridFunction kf = kantorovich_apply(cell_averages(f, box, n, 2, Placement::symmetric), k, shape);
    const double lhs = mixed_lebesgue_norm(kf, {2, 3});
    const double rhs = lebesgue_const * mixed_lebesgue_norm(f, {2, 3});
    if (!(lhs <= rhs + 1e-6)) ++lebesgue_fail;
    worst_ratio = std::max(worst_ratio, lhs / rhs);
    const double mlhs = mixed_orlicz_modular(kf, Phi, 1.0).value;
    const double mrhs = mixed_orlicz_modular(f, Phi, lambda_prime).value;
    if (!(mlhs <= mrhs + 1e-6)) ++modular_fail;
    worst_modular_ratio = std::max(worst_modular_ratio, mlhs / mrhs);
  }
  o.require(lebesgue_fail == 0, std::to_string(lebesgue_fail) + " mixed-norm bound violations");
  o.require(modular_fail == 0, std::to_string(modular_fail) + " modular bound violations");
  o.note(fmt("norm bound constant %.4g, worst lhs/rhs %.3g, worst modular lhs/rhs %.3g", lebesgue_const, worst_ratio,
             worst_modular_ratio));
  return o;
}

struct TableRun {
  std::vector<double> sup;
  std::vector<double> mixed;
  std::vector<double> modular;
};

TableRun error_table(ExampleFunction which, const DensityKernel& k, const MixedExponents& P,
                     const OrliczVector* Phi) {
  const auto field = example_field(which);
  const BoxDomain box = BoxDomain::unit(2);
  const std::vector<std::size_t> shape = {128, 128};
  const GridFunction exact = GridFunction::sample(box, shape, field);
  TableRun run;
  for (int n : {10, 20, 30, 40}) {
    const GridFunction approx = kantorovich_apply_grid(field, box, k, n, 4, shape);
    const GridFunction err = difference(exact, approx);
    run.sup.push_back(sup_error(exact, approx));
    run.mixed.push_back(mixed_lebesgue_norm(err, P));
    if (Phi) run.modular.push_back(mixed_orlicz_modular(err, *Phi, 1.0).value);
  }
  return run;
}

void check_against(Outcome& o, const std::string& label, const std::vector<double>& got,
                   const std::vector<double>& published) {
  const int ns[] = {10, 20, 30, 40};
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double rel = std::fabs(got[i] - published[i]) / published[i];
    if (rel > 0.30) {
      o.require(false, label + " n=" + std::to_string(ns[i]) + fmt(" %.5g vs %.5g (%.0f%% off)", got[i],
                                                                    published[i], 100.0 * rel));
    }
  }
  o.require(strictly_decreasing(got), label + " strictly decreasing " + list(got));
}

Outcome table_example1() {
  Outcome o;
  const TableRun run = error_table(ExampleFunction::example1, DensityKernel(SigmoidKind::tanh()), {2, 3}, nullptr);
  check_against(o, "sup", run.sup, {0.66529, 0.33918, 0.18669, 0.1147});
  check_against(o, "L(2,3)", run.mixed, {0.16642, 0.097045, 0.067351, 0.053271});
  o.note("sup " + list(run.sup) + ", L(2,3) " + list(run.mixed));
  return o;
}

Outcome table_example2() {
  Outcome o;
  const TableRun run =
      error_table(ExampleFunction::example2, DensityKernel(SigmoidKind::logistic()), {3, 4}, nullptr);
  check_against(o, "L(3,4)", run.mixed, {0.20246, 0.13517, 0.096905, 0.078261});
  o.note("L(3,4) " + list(run.mixed));
  return o;
}

Outcome modular_trend() {
  Outcome o;
  const OrliczVector Phi = OrliczVector::parse("exp:2,log:2:1.7");
  const TableRun run = error_table(ExampleFunction::example1, DensityKernel(SigmoidKind::tanh()), {2, 2}, &Phi);
  o.require(strictly_decreasing(run.modular), "strict decrease " + list(run.modular));
  const double ratio = run.modular.back() / run.modular.front();
  o.require(ratio < 0.05, fmt("n=40/n=10 ratio %.3g", ratio));
  o.note("modular " + list(run.modular) + fmt(", ratio %.3g", ratio));
  return o;
}

Outcome image_pipelines() {
  Outcome o;
  const Image clean = load_pgm(KANTNN_DATA_DIR "/test_image_128.pgm");
  o.require(clean.height() == 128 && clean.width() == 128, "test image is 128x128");

  const DensityKernel tanh(SigmoidKind::tanh());
  const DensityKernel logistic(SigmoidKind::logistic());
  std::vector<double> rp, rs;
  for (int n : {50, 100, 150, 200}) {
    const QualityReport q = quality(clean, reconstruct(clean, tanh, n));
    rp.push_back(q.psnr_db);
    rs.push_back(q.ssim);
  }
  o.require(strictly_increasing(rp), "reconstruction PSNR " + list(rp));
  o.require(strictly_increasing(rs), "reconstruction SSIM " + list(rs));

  Image masked = clean;
  masked.set_mask(make_mask(128, 128, 0.21, 21));
  std::vector<double> ip;
  bool pass_through = true;
  for (int n : {10, 50, 100, 150}) {
    const Image out = inpaint(masked, logistic, n);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (masked.valid(i) && out[i] != clean[i]) pass_through = false;
    }
    ip.push_back(psnr(clean, out));
  }
  o.require(pass_through, "inpainting pass-through");
  o.require(strictly_increasing(ip), "inpainting PSNR " + list(ip));

  const Image noisy = add_noise(clean, NoiseSpec::parse("impulse:0.05", 3));
  const double noisy_psnr = psnr(clean, noisy);
  std::vector<double> dp;
  for (int n : {50, 100, 150, 200}) dp.push_back(psnr(clean, denoise(noisy, logistic, n)));
  for (double v : dp) o.require(v > noisy_psnr, fmt("denoised %.4g dB above noisy %.4g dB", v, noisy_psnr));

  for (int s : {2, 3}) {
    o.require(downsample(upscale(clean, tanh, 64, 4, s), s).same_size(clean), "scale roundtrip S=" + std::to_string(s));
  }
  o.note("recon PSNR " + list(rp) + ", inpaint PSNR " + list(ip) + fmt(", noisy %.4g dB", noisy_psnr) +
         ", denoised " + list(dp));
  return o;
}

Outcome norm_comparison() {
  Outcome o;
  const GridFunction clean = peaks_field(148);
  const GridFunction filtered = spatial_filter(add_gaussian_noise(clean, 0.3, 42), FilterSpec::gaussian(1.0));
  const auto rows = compare_norms(clean, filtered, {2, 3, 4, 5, 6, 7, 8});
  for (const auto& r : rows) {
    o.require(r.mixed_next <= r.diagonal, fmt("p1=%g: L(p1,p1+1) %.5g <= L(p1,p1) %.5g", r.p1, r.mixed_next,
                                              r.diagonal));
    o.require(r.mixed_far <= r.mixed_next, fmt("p1=%g: L(p1,p1+2) %.5g <= L(p1,p1+1) %.5g", r.p1, r.mixed_far,
                                               r.mixed_next));
  }
  const double factor = rows.front().diagonal / rows.front().mixed_far;
  o.require(factor >= 2.0, fmt("L(2,2)/L(2,4) factor %.3g", factor));
  o.note(fmt("p1=2 row %.5g, %.5g, %.5g", rows[0].diagonal, rows[0].mixed_next, rows[0].mixed_far) +
         fmt(", factor %.3g", factor));
  return o;
}

Outcome norm_oracles() {
  Outcome o;
  Rng rng(110);
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  double nested = 0.0, diagonal = 0.0, coincidence = 0.0, residual = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t nx = 8 + rng.uniform_int(24), ny = 8 + rng.uniform_int(24);
    const GridFunction g = random_grid(rng, nx, ny, box);
    const std::vector<double> v(g.values().begin(), g.values().end());
    const double hx = 2.0 / static_cast<double>(nx), hy = 2.0 / static_cast<double>(ny);
    const double p1 = 1.0 + 4.0 * rng.uniform(), p2 = 1.0 + 4.0 * rng.uniform();
    nested = std::max(nested, std::fabs(mixed_lebesgue_norm(g, {p1, p2}) - oracle::mixed_norm_2d(v, nx, ny, hx, hy,
                                                                                                  p1, p2)));
    for (double p : {1.0, 2.0, 4.0}) {
      diagonal = std::max(diagonal, std::fabs(mixed_lebesgue_norm(g, {p, p}) - oracle::lp_norm_2d(v, hx * hy, p)));
    }
    const double q1 = std::min(p1, p2), q2 = std::max(p1, p2);
    const OrliczVector power{OrliczFunction::power(q1), OrliczFunction::power(q2 / q1)};
    coincidence = std::max(coincidence, std::fabs(mixed_orlicz_modular(g, power, 1.0).value -
                                                  std::pow(mixed_lebesgue_norm(g, {q1, q2}), q2)));
    const OrliczVector Phi = t % 2 ? OrliczVector::parse("exp:2,log:2:1.7") : power;
    const double l = luxemburg_norm(g, Phi);
    residual = std::max(residual, std::fabs(mixed_orlicz_modular(g, Phi, 1.0 / l).value - 1.0));
  }
  o.require(nested <= 1e-10, fmt("nested sums %.2e", nested));
  o.require(diagonal <= 1e-10, fmt("diagonal vs classical %.2e", diagonal));
  o.require(coincidence <= 1e-8, fmt("power coincidence %.2e", coincidence));
  o.require(residual <= 1e-8, fmt("Luxemburg residual %.2e", residual));
  o.note(fmt("nested %.1e, diagonal %.1e, coincidence %.1e", nested, diagonal, coincidence) +
         fmt(", Luxemburg residual %.1e", residual));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "kernel laws", 1.0, kernel_laws},
      {2, "operator vs naive reference", 5.0, operator_oracle},
      {3, "constant reproduction and range preservation", 10.0, constants_and_range},
      {4, "mixed-norm and modular boundedness", 30.0, boundedness_bounds},
      {5, "example 1 error table (tanh)", 120.0, table_example1},
      {6, "example 2 error table (logistic)", 120.0, table_example2},
      {7, "modular convergence trend", 120.0, modular_trend},
      {8, "image pipelines", 180.0, image_pipelines},
      {9, "mixed vs diagonal norm comparison", 120.0, norm_comparison},
      {10, "norm oracles", 30.0, norm_oracles},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget_s) o.require(false, fmt("runtime %.2f s over budget %.0f s", secs, c.budget_s));
    if (!o.ok) ++failures;
    std::printf("[%s] criterion %2d %s (%.2f s / %.0f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.title, secs,
                c.budget_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
