// ghostsim: command-line front end for the ghost interference simulator.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ghostsim/config.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/run.hpp"

namespace {

using namespace ghostsim;

void print_issues(const ConfigError& e) {
  std::cerr << "config error:\n";
  for (const auto& i : e.issues()) std::cerr << "  " << i << "\n";
}

struct RunArgs {
  std::string config_path;
  std::string preset_name;
  std::string mode;
  bool check = false;
  std::string out;
  std::string format;
  std::string lambda1, lambda2, f, d;
  std::vector<std::string> bucket_widths, y1;
  bool gnuplot = false;
  bool quiet = false;
};

double length_arg(const std::string& flag, const std::string& text) {
  try {
    return parse_length(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({flag + ": " + e.what()});
  }
}

RunConfig build_config(const RunArgs& a) {
  if (a.config_path.empty() == a.preset_name.empty())
    throw ConfigError({"run: give exactly one of a config file or --preset"});
  RunConfig c = a.config_path.empty() ? preset(a.preset_name) : validate_config(a.config_path);

  if (!a.mode.empty()) {
    if (a.mode == "analytic") c.mode = RunMode::analytic;
    else if (a.mode == "oracle") c.mode = RunMode::oracle;
    else if (a.mode == "compare") c.mode = RunMode::compare;
    else throw ConfigError({"--mode: expected analytic, oracle or compare"});
  }
  if (!a.format.empty()) {
    if (a.format == "csv") c.format = OutputFormat::csv;
    else if (a.format == "binary") c.format = OutputFormat::binary;
    else throw ConfigError({"--format: expected csv or binary"});
  }
  if (!a.out.empty()) c.output_dir = a.out;
  if (!a.lambda1.empty()) c.scenario.lambda1 = length_arg("--lambda1", a.lambda1);
  if (!a.lambda2.empty()) c.scenario.lambda2 = length_arg("--lambda2", a.lambda2);
  if (!a.d.empty()) c.scenario.slit_separation = length_arg("--d", a.d);
  if (!a.f.empty()) {
    if (a.f == "none") c.scenario.lens.reset();
    else c.scenario.lens = Lens{length_arg("--f", a.f)};
  }
  if (!a.bucket_widths.empty()) {
    c.outputs.bucket_widths.clear();
    for (const auto& w : a.bucket_widths) c.outputs.bucket_widths.push_back(length_arg("--bucket-width", w));
  }
  if (!a.y1.empty()) {
    c.outputs.slices.clear();
    for (const auto& y : a.y1) c.outputs.slices.push_back(length_arg("--y1", y));
  }
  ensure_grid(c);
  if (auto issues = config_issues(c); !issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

int do_run(const RunArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = build_config(a);
  RunOptions opt;
  opt.check = a.check;
  opt.gnuplot_script = a.gnuplot;
  const RunResult res = run(c, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!a.quiet) {
    std::cout << res.report;
    std::cout << "\nwrote " << res.files.size() << " files to " << c.output_dir << "\n";
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  std::fprintf(stderr, "elapsed %.3f s\n", secs);
  if (res.exit_code == exit_tolerance) std::cerr << "tolerance check failed\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-color ghost interference simulator", "ghostsim"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run a configuration file or a preset");
  run_cmd->add_option("config", ra.config_path, "YAML run configuration");
  run_cmd->add_option("--preset", ra.preset_name, "Built-in scenario (ding-fig3)");
  run_cmd->add_option("--mode", ra.mode, "analytic, oracle or compare");
  run_cmd->add_flag("--check", ra.check, "Exit 5 when oracle tolerances are breached");
  run_cmd->add_option("--out", ra.out, "Output directory");
  run_cmd->add_option("--format", ra.format, "2D density format: csv or binary");
  run_cmd->add_option("--lambda1", ra.lambda1, "Wavelength of particle 1 (e.g. 780nm)");
  run_cmd->add_option("--lambda2", ra.lambda2, "Wavelength of particle 2");
  run_cmd->add_option("--f", ra.f, "Lens focal length, or 'none'");
  run_cmd->add_option("--d", ra.d, "Slit separation");
  run_cmd->add_option("--bucket-width", ra.bucket_widths, "D1 window widths (repeatable, ascending)");
  run_cmd->add_option("--y1", ra.y1, "D1 positions for coincidence slices (repeatable)");
  run_cmd->add_flag("--gnuplot-script", ra.gnuplot, "Also write plot.gp");
  run_cmd->add_flag("--quiet", ra.quiet, "Do not print the report");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
  validate_cmd->add_option("config", validate_path, "YAML run configuration")->required();

  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "Print a built-in preset as YAML");
  preset_cmd->add_option("name", preset_name, "Preset name")->required();

  // `ghostsim --preset ding-fig3 ...` is shorthand for `ghostsim run --preset ...`.
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args.front().rfind("--", 0) == 0 && args.front() != "--help") args.insert(args.begin(), "run");
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*run_cmd) return do_run(ra);
    if (*validate_cmd) {
      const RunConfig c = validate_config(validate_path);
      std::cout << "valid: " << validate_path << " (D = " << c.scenario.D() << " m)\n";
      return exit_ok;
    }
    if (*preset_cmd) {
      std::cout << serialize_config(preset(preset_name));
      return exit_ok;
    }
  } catch (const ConfigError& e) {
    print_issues(e);
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return exit_ok;
}
