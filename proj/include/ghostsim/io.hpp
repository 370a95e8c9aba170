#pragma once

// Pattern files.
//
// CSV: header line, then one row per sample, numbers printed with 17 significant
// digits, '.' decimal separator, LF line endings. 1D files have two columns
// ("<axis> [m],density"); 2D files have three ("y1 [m],y2 [m],density") with y1
// the slow index.
//
// Binary (2D only), little-endian:
//   offset  0  char[8]  "GHOSTSIM"
//   offset  8  u32      format version (1)
//   offset 12  u32      reserved (0)
//   offset 16  u64      n1 (rows, y1)
//   offset 24  u64      n2 (columns, y2)
//   offset 32  f64 x4   y1 start, y1 stop, y2 start, y2 stop (m)
//   offset 64  f64      n1 * n2 densities, row-major
// Both axes are uniform with inclusive endpoints.

#include <string>

#include "ghostsim/pattern.hpp"

namespace ghostsim {

/// Writes a 1D or 2D pattern. `axis_name` labels the 1D abscissa (e.g. "y2").
void write_csv(const std::string& path, const Pattern& p, const std::string& axis_name = "y2");

/// Reads a 1D two-column CSV (header optional). The abscissa must be uniformly
/// spaced to 1e-6 of the step. Throws AnalysisError on malformed input.
Pattern read_csv(const std::string& path);

void write_binary(const std::string& path, const Pattern& p);
Pattern read_binary(const std::string& path);

/// Writes text with LF line endings exactly as given.
void write_text(const std::string& path, const std::string& text);

}  // namespace ghostsim
