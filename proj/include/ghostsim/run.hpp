#pragma once

// Pipeline runner behind the command-line tool. Writes pattern files and
// report.txt under the configured output directory. Outputs depend only on the
// configuration: no timestamps or timings are written to files.

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "ghostsim/analysis.hpp"
#include "ghostsim/config.hpp"

namespace ghostsim {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_physics = 3,
  exit_resource = 4,
  exit_tolerance = 5,
};

struct RunOptions {
  bool check = false;          // tolerance-gated exit in oracle/compare modes
  bool gnuplot_script = false; // also write plot.gp
};

struct RunResult {
  int exit_code = exit_ok;
  std::vector<std::string> files;  // written, relative to output_dir, in write order
  std::string report;              // contents of report.txt
  std::vector<std::string> warnings;
  std::optional<PatternComparison> comparison;  // compare mode, joint densities
  std::optional<double> norm_drift;             // oracle and compare modes
};

/// Runs the configured pipeline. Throws the library errors; see exit_code_for.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// Exit code for an exception escaping run(): 2 config, 3 physics or analysis,
/// 4 resource, 1 anything else.
int exit_code_for(const std::exception& e);

/// Adds a default grid when the mode needs one and none is configured.
void ensure_grid(RunConfig& config);

}  // namespace ghostsim
