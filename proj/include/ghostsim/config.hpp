#pragma once

// Run configuration: a YAML document with lengths in SI metres or with a unit
// suffix (nm, um, µm, mm, cm, m). Every violated constraint is reported with its
// field path, e.g. "scenario.lambda2: missing".

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ghostsim/scenario.hpp"

namespace ghostsim {

enum class RunMode { analytic, oracle, compare };
enum class OutputFormat { csv, binary };

std::string to_string(RunMode m);
std::string to_string(OutputFormat f);

struct OutputSelection {
  std::vector<double> slices{0.0};   // y1 positions of coincidence slices, m
  bool marginal1 = true;
  std::vector<double> bucket_widths;  // D1 window widths, m (ascending)
  bool fringe_report = true;
  bool density_2d = false;

  friend bool operator==(const OutputSelection&, const OutputSelection&) = default;
};

struct SamplingConfig {
  std::optional<double> y2_half_width;  // default: coincidence envelope window
  std::size_t y2_points = 4001;
  std::optional<double> y1_half_width;  // default: 4 sqrt(Delta1)
  std::size_t y1_points = 801;
  std::size_t joint_points = 401;  // per axis for the analytic 2D density

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct GridConfig {
  std::size_t n1 = 2048;
  std::size_t n2 = 2048;
  std::optional<double> extent1;  // default: smallest adequate (preflight)
  std::optional<double> extent2;
  std::size_t memory_cap = std::size_t{1} << 30;  // bytes

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct CheckConfig {
  double max_deviation = 1e-6;   // analytic vs oracle, relative to peak
  double max_norm_drift = 1e-10;

  friend bool operator==(const CheckConfig&, const CheckConfig&) = default;
};

struct RunConfig {
  Scenario scenario{};
  RunMode mode = RunMode::analytic;
  OutputSelection outputs;
  SamplingConfig sampling;
  std::optional<GridConfig> grid;
  CheckConfig check;
  std::string output_dir = "out";
  OutputFormat format = OutputFormat::csv;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// "1530 nm", "0.325", "3.25e-1 m", "100um". Throws std::invalid_argument.
double parse_length(const std::string& text);

/// Parses YAML text. Throws ConfigError listing every problem.
RunConfig parse_config(const std::string& yaml_text);

/// Reads and parses a config file. Throws ConfigError (including for a missing file).
RunConfig validate_config(const std::string& path);

/// Checks cross-field invariants (scenario, grid requirement, sampling). Returns
/// the issue list; empty when valid.
std::vector<std::string> config_issues(const RunConfig& c);

/// Deterministic YAML text that parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& c);

/// Built-in presets by name; currently "ding-fig3". Throws ConfigError for unknown names.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ghostsim
