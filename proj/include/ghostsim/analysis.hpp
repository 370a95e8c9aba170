#pragma once

// Fringe measurements on sampled patterns.
//
// A pattern is modelled as envelope * (1 + V cos(k y + phase)). The envelope is
// a Gaussian fitted through the local maxima (or through the whole support when
// there are too few maxima); dividing it out leaves the fringe signal, whose
// frequency is measured by a windowed spectral scan and by peak spacing.

#include <cstddef>
#include <string>
#include <vector>

#include "ghostsim/engine.hpp"
#include "ghostsim/pattern.hpp"

namespace ghostsim {

enum class FringeMethod { spectral_peak, peak_spacing };

std::string to_string(FringeMethod m);

struct FringeReport {
  double spacing;      // reported spacing (spectral peak), m
  double uncertainty;  // grid step / sqrt(n_fringes_used)
  double visibility;   // contrast of the fitted cosine over the central three fringes
  double envelope_width;  // FWHM of the fitted Gaussian envelope, m
  double phase;           // fringe signal ~ 1 + V cos(2 pi y / spacing + phase)
  double envelope_center; // m
  FringeMethod method;
  std::size_t n_fringes_used;
  double spacing_spectral;
  double spacing_peaks;  // NaN when fewer than two maxima
  bool methods_disagree; // estimators differ by more than 2%
};

/// Throws AnalysisError for 2D patterns, flat signals ("no fringes") and
/// fewer than 4 periods inside the analysis window ("too few fringes").
FringeReport extract_fringes(const Pattern& p);

/// Cosine contrast at a known spacing over the three fringes around the envelope
/// peak, after envelope division. Works for fringe-free patterns (returns ~0).
double visibility_at(const Pattern& p, double spacing);

struct PatternComparison {
  double max_abs_dev;  // relative to the peak of a
  double rms_dev;
  double spacing_ratio;  // spacing(a) / spacing(b); NaN if either extraction fails
};

/// 1D patterns: b is interpolated onto the part of a's axis it covers. 2D
/// patterns must share axes. Disjoint ranges throw AnalysisError.
PatternComparison compare_patterns(const Pattern& a, const Pattern& b);

struct BucketRow {
  double width;
  double visibility;
};

struct BucketTable {
  std::vector<BucketRow> rows;
  bool monotone;  // visibility non-increasing in width
};

/// Visibility of the bucket-averaged coincidence pattern for each window width.
/// Widths must be non-negative and ascending.
BucketTable visibility_vs_bucket(const JointDensity& jd, const std::vector<double>& widths, const Axis& y2_grid,
                                 double y1_center = 0.0);

}  // namespace ghostsim
