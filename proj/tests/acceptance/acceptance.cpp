// Acceptance suite: one PASS/FAIL line per criterion with pinned tolerances.
//   acceptance                 run every criterion, exit 1 if any fails
//   acceptance --criterion N   run one criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ghostsim/analysis.hpp"
#include "ghostsim/config.hpp"
#include "ghostsim/engine.hpp"
#include "ghostsim/io.hpp"
#include "ghostsim/run.hpp"

namespace {

using namespace ghostsim;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Sampling that resolves the expected period with at least 40 points.
Axis slice_axis(const Scenario& s, double period) {
  const double half = default_y2_half_width(s);
  const auto n = static_cast<std::size_t>(std::max(4001.0, std::ceil(2.0 * half / (period / 40.0)) + 1.0));
  return Axis::symmetric(half, n | 1u);
}

double extracted_spacing(const Scenario& s, double y1 = 0.0) {
  const JointDensity jd = joint_density(s);
  return extract_fringes(coincidence_slice(jd, y1, slice_axis(s, 2.0 * kPi / jd.theta2))).spacing;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ghostsim_acceptance_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

Outcome reference_reproduction() {
  const double target = 3.2955e-3, tol = 0.01, max_seconds = 5.0;
  RunConfig c = preset("ding-fig3");
  c.mode = RunMode::analytic;
  c.output_dir = scratch_dir("reference").string();
  const auto t0 = Clock::now();
  const RunResult r = run(c);
  const double secs = seconds_since(t0);
  const Pattern slice = read_csv(c.output_dir + "/pattern_slice_0.csv");
  const double w = extract_fringes(slice).spacing;
  std::filesystem::remove_all(c.output_dir);
  const double rel = std::abs(w / target - 1.0);
  return {r.exit_code == exit_ok && rel <= tol && secs < max_seconds,
          fmt("spacing %.5f mm vs %.4f mm (rel %.2e, tol %.0e), runtime %.2f s (< %.0f s)", w * 1e3, target * 1e3,
              rel, tol, secs, max_seconds)};
}

Outcome young_limit() {
  const double tol = 1e-3;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> lam(400e-9, 1600e-9), l1(0.3, 2.0), l2(0.1, 1.0), d(0.3e-3, 2e-3),
      frac(0.2, 1.0), angle(0.2, 1.3);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    Scenario s = ding_fig3();
    s.lambda1 = s.lambda2 = lam(rng);
    s.L1 = l1(rng);
    s.L2 = l2(rng);
    s.slit_separation = d(rng);
    // pi gamma^2 <= 0.01 lambda D, split between slit width and correlation length.
    const double gamma = frac(rng) * std::sqrt(0.01 * s.lambda2 * s.D() / kPi);
    const double a = angle(rng);
    s.slit_width = gamma * std::cos(a);
    s.source.ell_sigma = gamma * std::sin(a);
    s.source.omega = default_omega(s.slit_separation, s.gamma());
    const double young = s.lambda2 * s.D() / s.slit_separation;
    try {
      const double rel = std::abs(extracted_spacing(s) / young - 1.0);
      worst = std::max(worst, rel);
      if (!(rel <= tol)) ++bad;
    } catch (const std::exception& e) {
      ++bad;
      std::fprintf(stderr, "geometry %d: %s\n", i, e.what());
    }
  }
  return {bad == 0, fmt("20 geometries, worst rel deviation from lambda2 D / d %.2e (tol %.0e), %d outside", worst,
                        tol, bad)};
}

Outcome nonlocal_wavelength() {
  const double tol = 5e-3;
  const Scenario base = ding_fig3();
  const double expected = base.L2 / base.slit_separation;
  std::vector<double> xs, ys;
  for (double nm : {780.0, 985.0, 1190.0, 1395.0, 1600.0}) {
    Scenario s = base;
    s.lambda1 = nm * 1e-9;
    xs.push_back(s.lambda1);
    ys.push_back(extracted_spacing(s));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double rel = std::abs(slope / expected - 1.0);
  return {rel <= tol, fmt("slope %.3f vs L2/d = %.1f (rel %.2e, tol %.0e)", slope, expected, rel, tol)};
}

Outcome lens_reduction() {
  const double target = 2.6715e-3, tol = 0.01;
  Scenario s = ding_fig3();
  s.lens = Lens{0.1};
  const double w = extracted_spacing(s);
  const double rel = std::abs(w / target - 1.0);
  std::vector<double> ws;
  std::string list;
  for (double f : {0.05, 0.1, 0.2, 0.3}) {
    Scenario sf = ding_fig3();
    sf.lens = Lens{f};
    ws.push_back(extracted_spacing(sf));
    list += fmt("%s%.4f", list.empty() ? "" : ", ", ws.back() * 1e3);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ws.size(); ++i) decreasing = decreasing && ws[i] < ws[i - 1];
  return {rel <= tol && decreasing, fmt("f = 0.1 m: %.5f mm vs %.4f mm (rel %.2e, tol %.0e); w2 over f = "
                                        "0.05/0.1/0.2/0.3 m: %s mm, strictly decreasing: %s",
                                        w * 1e3, target * 1e3, rel, tol, list.c_str(), decreasing ? "yes" : "no")};
}

Outcome oracle_equivalence() {
  const double max_dev = 1e-6, max_drift = 1e-10, max_seconds = 120.0;
  RunConfig c = preset("ding-fig3");
  c.mode = RunMode::compare;
  c.grid = GridConfig{};
  c.grid->n1 = c.grid->n2 = 2048;
  c.outputs.slices.clear();
  c.outputs.bucket_widths.clear();
  c.outputs.marginal1 = false;
  c.output_dir = scratch_dir("oracle").string();
  const auto t0 = Clock::now();
  const RunResult r = run(c);
  const double secs = seconds_since(t0);
  std::filesystem::remove_all(c.output_dir);
  if (!r.comparison || !r.norm_drift) return {false, "compare run produced no comparison"};
  const double dev = r.comparison->max_abs_dev, drift = *r.norm_drift;
  return {dev < max_dev && drift < max_drift && secs < max_seconds,
          fmt("2048x2048: max deviation %.2e of peak (< %.0e), norm drift %.2e (< %.0e), runtime %.1f s (< %.0f s)",
              dev, max_dev, drift, max_drift, secs, max_seconds)};
}

Outcome complementarity() {
  const double which_way_max = 1e-3, product_min = 0.9;
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const Pattern m = marginal_particle1(jd, Axis::symmetric(4.0 * std::sqrt(jd.approximation.delta1), 4001));
  const double v_which_way = visibility_at(m, 2.0 * kPi / jd.theta1);

  // Product-state limit: correlation length 10 d, centre-of-mass width 100 d.
  Scenario u = ding_fig3();
  u.source.ell_sigma = 10.0 * u.slit_separation;
  u.source.omega = 100.0 * u.slit_separation;
  const JointDensity ju = joint_density(u);
  const double period = u.lambda1 * u.L1 / u.slit_separation;
  const double half = 8.0 * u.lambda1 * u.L1 / (kPi * u.slit_width);
  const Pattern mu = marginal_particle1(ju, Axis::symmetric(half, 8001));
  const FringeReport fr = extract_fringes(mu);
  return {v_which_way < which_way_max && fr.visibility > product_min,
          fmt("which-way regime %.2e (< %.0e); product-state regime %.4f (> %.1f) at spacing %.4f mm (Young %.4f mm)",
              v_which_way, which_way_max, fr.visibility, product_min, fr.spacing * 1e3, period * 1e3)};
}

Outcome shift_covariance() {
  const double delta = 50e-6, shift_tol = 1e-3, spacing_tol = 1e-3;
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const Axis ax = slice_axis(s, 2.0 * kPi / jd.theta2);
  const FringeReport a = extract_fringes(coincidence_slice(jd, 0.0, ax));
  const FringeReport b = extract_fringes(coincidence_slice(jd, delta, ax));
  // Pattern ~ cos(k y2 + phase): a phase step of dphi moves it by -dphi / k.
  const double k = 2.0 * kPi / a.spacing;
  const double shift = -std::remainder(b.phase - a.phase, 2.0 * kPi) / k;
  const double expected = -jd.theta1 * delta / jd.theta2;
  const double shift_rel = std::abs(shift / expected - 1.0);
  const double spacing_rel = std::abs(b.spacing / a.spacing - 1.0);
  return {shift_rel <= shift_tol && spacing_rel < spacing_tol,
          fmt("shift %.4f um vs -theta1 delta / theta2 = %.4f um (rel %.2e, tol %.0e); spacing change %.2e (< %.0e)",
              shift * 1e6, expected * 1e6, shift_rel, shift_tol, spacing_rel, spacing_tol)};
}

Outcome bucket_degradation() {
  const double full_period_max = 1e-3;
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const Axis ax = slice_axis(s, 2.0 * kPi / jd.theta2);
  const double period1 = 2.0 * kPi / jd.theta1;
  const BucketTable t = visibility_vs_bucket(jd, {0.2e-3, 1e-3}, ax);
  const BucketTable full = visibility_vs_bucket(jd, {period1}, ax);
  const double v02 = t.rows[0].visibility, v1 = t.rows[1].visibility, vp = full.rows[0].visibility;
  return {v1 < v02 && vp < full_period_max,
          fmt("V(0.2 mm) %.5f > V(1 mm) %.5f: %s; V(2 pi / theta1 = %.4f mm) %.4f (< %.0e)", v02, v1,
              v1 < v02 ? "yes" : "no", period1 * 1e3, vp, full_period_max)};
}

Outcome uncertainty_diagnostics() {
  const double eq_tol = 1e-9;
  std::mt19937_64 rng(977);
  std::uniform_real_distribution<double> log_len(std::log(1e-7), std::log(1e-1));
  double min_product = INFINITY;
  int below = 0;
  for (int i = 0; i < 1000; ++i) {
    Scenario s = ding_fig3();
    s.source.ell_sigma = std::exp(log_len(rng));
    s.source.omega = std::exp(log_len(rng));
    const Uncertainties u = uncertainties(s);
    const double p = u.dy * u.dk;
    min_product = std::min(min_product, p);
    if (!(p >= 0.5 * (1.0 - 1e-12))) ++below;
  }
  Scenario s = ding_fig3();
  s.source.omega = 1e-3;
  s.source.ell_sigma = 2.0 * s.source.omega;
  const Uncertainties u = uncertainties(s);
  const double eq = std::abs(u.dy * u.dk - 0.5);
  return {below == 0 && eq <= eq_tol,
          fmt("1000 sources: min dy dk %.12f, %d below 1/2; at ell_sigma = 2 Omega |dy dk - 1/2| = %.1e (tol %.0e)",
              min_product, below, eq, eq_tol)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "reference fringe spacing", reference_reproduction},
      {2, "Young limit", young_limit},
      {3, "nonlocal wavelength slope", nonlocal_wavelength},
      {4, "lens reduction", lens_reduction},
      {5, "oracle equivalence", oracle_equivalence},
      {6, "complementarity", complementarity},
      {7, "shift covariance", shift_covariance},
      {8, "bucket-detector degradation", bucket_degradation},
      {9, "uncertainty diagnostics", uncertainty_diagnostics},
  };
  return all;
}

bool report(const Criterion& c) {
  Outcome o;
  try {
    o = c.check();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  std::printf("criterion %d %s: %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    const int id = std::atoi(argv[2]);
    for (const auto& c : criteria())
      if (c.id == id) return report(c) ? 0 : 1;
    std::fprintf(stderr, "unknown criterion %s\n", argv[2]);
    return 2;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
    return 2;
  }
  int failed = 0;
  for (const auto& c : criteria()) failed += report(c) ? 0 : 1;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria().size()) - failed, criteria().size());
  return failed == 0 ? 0 : 1;
}
