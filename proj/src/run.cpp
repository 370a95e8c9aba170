#include "ghostsim/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "ghostsim/engine.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/grid.hpp"
#include "ghostsim/io.hpp"

namespace ghostsim {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Human-scale rendering: nm below 10 um, mm otherwise.
std::string human(double v) {
  char buf[40];
  if (std::abs(v) < 1e-5)
    std::snprintf(buf, sizeof buf, "%.4f nm", v * 1e9);
  else
    std::snprintf(buf, sizeof buf, "%.4f mm", v * 1e3);
  return buf;
}

std::string yes(bool b) { return b ? "true" : "false"; }

class Report {
 public:
  void section(const std::string& name) { o_ << "\n[" << name << "]\n"; }
  void line(const std::string& key, const std::string& value) { o_ << key << " = " << value << "\n"; }
  void length(const std::string& key, double v) { line(key, g17(v) + " m (" + human(v) + ")"); }
  void number(const std::string& key, double v, const std::string& unit = "") {
    line(key, g17(v) + (unit.empty() ? "" : " " + unit));
  }
  void text(const std::string& s) { o_ << s << "\n"; }
  std::string str() const { return o_.str(); }

 private:
  std::ostringstream o_;
};

Pattern oracle_row(const OracleRun& run, double y1) {
  const GridSpec& g = run.spec;
  auto i = static_cast<std::size_t>(std::llround((y1 + g.extent1) / g.dy1()));
  if (i >= g.n1) i = g.n1 - 1;
  Pattern p;
  p.label = "oracle_slice";
  p.x = g.axis2();
  p.fixed_y1 = g.y1(i);
  p.values.assign(run.joint.values.begin() + static_cast<long>(i * g.n2),
                  run.joint.values.begin() + static_cast<long>((i + 1) * g.n2));
  return p;
}

void fringe_lines(Report& r, const std::string& prefix, const Pattern& p) {
  try {
    const FringeReport f = extract_fringes(p);
    r.length(prefix + ".spacing", f.spacing);
    r.number(prefix + ".uncertainty", f.uncertainty, "m");
    r.length(prefix + ".spacing_peak_method", f.spacing_peaks);
    r.line(prefix + ".methods_disagree", yes(f.methods_disagree));
    r.number(prefix + ".visibility", f.visibility);
    r.length(prefix + ".envelope_fwhm", f.envelope_width);
    r.number(prefix + ".n_fringes_used", static_cast<double>(f.n_fringes_used));
  } catch (const AnalysisError& e) {
    r.line(prefix + ".error", e.what());
  }
}

}  // namespace

void ensure_grid(RunConfig& config) {
  if ((config.mode == RunMode::oracle || config.mode == RunMode::compare) && !config.grid) config.grid = GridConfig{};
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_config;
  if (dynamic_cast<const PhysicsError*>(&e) || dynamic_cast<const AnalysisError*>(&e)) return exit_physics;
  if (dynamic_cast<const ResourceError*>(&e)) return exit_resource;
  return 1;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  if (auto issues = config_issues(config); !issues.empty()) throw ConfigError(std::move(issues));
  const Scenario& s = config.scenario;
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);

  RunResult res;
  auto write_pattern = [&](const std::string& name, const Pattern& p, const std::string& axis) {
    write_csv((dir / name).string(), p, axis);
    res.files.push_back(name);
  };
  auto write_joint = [&](const std::string& stem, const Pattern& p) {
    if (config.format == OutputFormat::binary) {
      write_binary((dir / (stem + ".bin")).string(), p);
      res.files.push_back(stem + ".bin");
    } else {
      write_csv((dir / (stem + ".csv")).string(), p);
      res.files.push_back(stem + ".csv");
    }
  };

  const JointDensity jd = joint_density(s);
  for (const auto& w : jd.slit.warnings) res.warnings.push_back(w);
  const double half2 = config.sampling.y2_half_width.value_or(default_y2_half_width(s));
  const double envelope1 = std::sqrt(jd.approximation.delta1);  // 1/e^2 half-width of the particle-1 envelope
  const double half1 = config.sampling.y1_half_width.value_or(4.0 * envelope1);
  const Axis y2_axis = Axis::symmetric(half2, config.sampling.y2_points);
  const Axis y1_axis = Axis::symmetric(half1, config.sampling.y1_points);

  Report r;
  r.text("ghostsim report");
  r.line("mode", to_string(config.mode));

  r.section("scenario");
  r.length("lambda1", s.lambda1);
  r.length("lambda2", s.lambda2);
  r.length("L1", s.L1);
  r.length("L2", s.L2);
  r.length("D", s.D());
  r.length("d", s.slit_separation);
  r.length("epsilon", s.slit_width);
  r.length("gamma", s.gamma());
  r.length("ell_sigma", s.source.ell_sigma);
  r.length("omega", s.source.omega);
  r.line("lens.f", s.lens ? g17(s.lens->focal_length) + " m" : std::string("none"));

  r.section("source");
  const Uncertainties u = uncertainties(s);
  r.number("dy", u.dy, "m");
  r.number("dk", u.dk, "1/m");
  r.number("dy_dk", u.dy * u.dk);

  r.section("slit");
  r.number("pass_probability", jd.slit.pass_probability);
  r.number("y0", s.y0(), "m");
  r.number("y0_prime", jd.slit.y0_prime, "m");
  r.number("y0_prime_closed_form", closed_form_y0_prime(s), "m");
  r.line("Gamma", g17(jd.slit.gamma.real()) + " + " + g17(jd.slit.gamma.imag()) + "i m^2");
  r.number("mode_overlap", jd.slit.mode_overlap);
  r.number("packet_overlap", jd.slit.packet_overlap);

  r.section("fringes");
  r.number("theta1", jd.theta1, "rad/m");
  r.number("theta2", jd.theta2, "rad/m");
  r.number("theta1_closed_form", jd.approximation.theta1, "rad/m");
  r.number("theta2_closed_form", jd.approximation.theta2, "rad/m");
  const FringeWidths fw = fringe_width(s);
  r.length("w2.exact", fw.exact);
  r.length("w2.simplified", fw.simplified);
  r.length("w2.young_equivalent", fw.young_equivalent);
  r.length("w2.from_theta2", 2.0 * std::acos(-1.0) / std::abs(jd.theta2));

  r.section("regime");
  const RegimeFlags& f = jd.regime;
  r.line("good_correlation", yes(f.good_correlation));
  r.number("omega_over_epsilon", f.omega_over_slit_width);
  r.number("omega_over_ell_sigma", f.omega_over_ell_sigma);
  r.line("closed_form_accurate", yes(f.closed_form_accurate));
  r.number("spreading_ratio", f.spreading_ratio);
  r.line("simplified_valid", yes(f.simplified_valid));
  r.number("simplified_ratio", f.simplified_ratio);
  r.line("separated_slits", yes(f.separated_slits));
  r.number("slit_overlap", f.slit_overlap);

  // Analytic patterns.
  if (config.mode != RunMode::oracle) {
    r.section("patterns");
    for (std::size_t i = 0; i < config.outputs.slices.size(); ++i) {
      const double y1 = config.outputs.slices[i];
      if (std::abs(y1) > envelope1)
        res.warnings.push_back("slice y1 = " + g17(y1) + " m lies outside the particle-1 envelope (1/e^2 half-width " +
                               g17(envelope1) + " m)");
      Pattern p = coincidence_slice(jd, y1, y2_axis);
      for (const auto& w : p.warnings) res.warnings.push_back(w);
      const std::string name = "pattern_slice_" + std::to_string(i) + ".csv";
      write_pattern(name, p, "y2");
      r.line("slice." + std::to_string(i), name + " at y1 = " + g17(y1) + " m");
      if (config.outputs.fringe_report) fringe_lines(r, "slice." + std::to_string(i), p);
    }
    if (config.outputs.marginal1) {
      const Pattern m = marginal_particle1(jd, y1_axis);
      write_pattern("pattern_marginal1.csv", m, "y1");
      r.line("marginal1", "pattern_marginal1.csv");
      try {
        r.number("marginal1.visibility_at_theta1_period", visibility_at(m, 2.0 * std::acos(-1.0) / jd.theta1));
      } catch (const AnalysisError& e) {
        r.line("marginal1.error", e.what());
      }
    }
    if (!config.outputs.bucket_widths.empty()) {
      const double y1c = config.outputs.slices.empty() ? 0.0 : config.outputs.slices.front();
      for (std::size_t i = 0; i < config.outputs.bucket_widths.size(); ++i) {
        const double w = config.outputs.bucket_widths[i];
        const std::string name = "pattern_bucket_" + std::to_string(i) + ".csv";
        write_pattern(name, bucket_average(jd, y1c, w, y2_axis), "y2");
        r.line("bucket." + std::to_string(i), name + " width " + g17(w) + " m centred at y1 = " + g17(y1c) + " m");
      }
      const BucketTable t = visibility_vs_bucket(jd, config.outputs.bucket_widths, y2_axis, y1c);
      for (std::size_t i = 0; i < t.rows.size(); ++i) r.number("bucket." + std::to_string(i) + ".visibility", t.rows[i].visibility);
      r.line("bucket.monotone", yes(t.monotone));
      if (!t.monotone) res.warnings.push_back("bucket visibility is not monotone in window width");
    }
    if (config.outputs.density_2d) {
      const std::size_t n = config.sampling.joint_points;
      write_joint("joint", joint_pattern(jd, Axis::symmetric(half1, n), Axis::symmetric(half2, n)));
      r.line("joint", res.files.back());
    }
  }

  // Grid oracle.
  if (config.mode != RunMode::analytic) {
    const GridConfig& gc = *config.grid;
    GridSpec spec;
    if (gc.extent1 && gc.extent2) {
      spec = {gc.n1, gc.n2, *gc.extent1, *gc.extent2};
      spec.validate();
      if (spec.memory_bytes() > gc.memory_cap)
        throw ResourceError("grid needs " + std::to_string(spec.memory_bytes() >> 20) + " MiB, above the cap of " +
                            std::to_string(gc.memory_cap >> 20) + " MiB");
    } else {
      spec = preflight(s, gc.n1, gc.n2, gc.memory_cap);
      if (gc.extent1) spec.extent1 = *gc.extent1;
      if (gc.extent2) spec.extent2 = *gc.extent2;
    }
    const OracleRun orc = run_oracle(s, spec);
    res.norm_drift = orc.norm_drift;

    r.section("oracle");
    r.line("grid", std::to_string(spec.n1) + " x " + std::to_string(spec.n2));
    r.number("extent1", spec.extent1, "m");
    r.number("extent2", spec.extent2, "m");
    r.number("pass_probability", orc.passed);
    r.number("y0_prime_fit", orc.fit_a.complex_center().real(), "m");
    r.line("Gamma_fit", g17(orc.fit_a.width.real()) + " + " + g17(orc.fit_a.width.imag()) + "i m^2");
    r.number("packet_overlap", orc.packet_overlap);
    for (const auto& rec : orc.norm_history) r.number("norm." + rec.stage, rec.norm);
    r.number("norm_drift", orc.norm_drift);

    const Pattern row = oracle_row(orc, config.outputs.slices.empty() ? 0.0 : config.outputs.slices.front());
    write_pattern("pattern_oracle_slice.csv", row, "y2");
    r.line("oracle_slice", "pattern_oracle_slice.csv at y1 = " + g17(*row.fixed_y1) + " m");
    if (config.outputs.fringe_report) fringe_lines(r, "oracle_slice", row);
    if (config.outputs.density_2d) {
      write_joint("joint_oracle", orc.joint);
      r.line("joint_oracle", res.files.back());
    }

    bool breach = orc.norm_drift > config.check.max_norm_drift;
    if (config.mode == RunMode::compare) {
      Pattern analytic = joint_pattern(jd, spec.axis1(), spec.axis2());
      const PatternComparison cmp = compare_patterns(analytic, orc.joint);
      res.comparison = cmp;
      Pattern slice = coincidence_slice(jd, *row.fixed_y1, spec.axis2());
      const PatternComparison slice_cmp = compare_patterns(slice, row);

      r.section("compare");
      r.number("joint.max_abs_dev", cmp.max_abs_dev);
      r.number("joint.rms_dev", cmp.rms_dev);
      r.number("slice.max_abs_dev", slice_cmp.max_abs_dev);
      r.number("slice.spacing_ratio", slice_cmp.spacing_ratio);
      r.number("tolerance.max_deviation", config.check.max_deviation);
      r.number("tolerance.max_norm_drift", config.check.max_norm_drift);
      breach = breach || !(cmp.max_abs_dev <= config.check.max_deviation);
    }
    r.line("within_tolerance", yes(!breach));
    if (options.check && breach) res.exit_code = exit_tolerance;
  }

  if (options.gnuplot_script) {
    std::ostringstream gp;
    gp << "# gnuplot -p plot.gp\nset datafile separator ','\nset key autotitle columnhead\n";
    gp << "set xlabel 'position [m]'\nset ylabel 'density'\n";
    bool first = true;
    for (const auto& file : res.files) {
      if (file.rfind("pattern_", 0) != 0) continue;
      gp << (first ? "plot " : ", \\\n     ") << "'" << file << "' using 1:2 with lines title '" << file << "'";
      first = false;
    }
    gp << "\n";
    write_text((dir / "plot.gp").string(), gp.str());
    res.files.push_back("plot.gp");
  }

  r.section("warnings");
  for (const auto& w : res.warnings) r.text("- " + w);

  r.section("files");
  for (const auto& file : res.files) r.text("- " + file);

  res.report = r.str();
  write_text((dir / "report.txt").string(), res.report);
  res.files.push_back("report.txt");
  return res;
}

}  // namespace ghostsim
