#pragma once

// Physical parameters of a two-color ghost interference setup.
//
// Particle 1 crosses a Gaussian double slit at distance L2 from the source and
// travels L1 further to detector D1. Particle 2 has no slit and reaches D2 after
// L1 + L2, optionally through a converging lens placed f before D2.

#include <optional>
#include <string>
#include <vector>

namespace ghostsim {

struct SourceParams {
  double ell_sigma;  // relative-coordinate correlation length (hbar/sigma), m
  double omega;      // center-of-mass width, m
};

struct Lens {
  double focal_length;  // m
};

struct Scenario {
  double lambda1;          // m
  double lambda2;          // m
  double L1;               // slit to D1, m
  double L2;               // source to slit, m
  double slit_separation;  // d = 2 y0, m
  double slit_width;       // epsilon, m
  SourceParams source;
  std::optional<Lens> lens;

  double y0() const noexcept { return slit_separation / 2.0; }
  /// gamma^2 = epsilon^2 + ell_sigma^2.
  double gamma2() const noexcept { return slit_width * slit_width + source.ell_sigma * source.ell_sigma; }
  double gamma() const;
  double D() const noexcept { return L1 + 2.0 * L2; }
  double L() const noexcept { return L1 + L2; }
  /// Distance travelled by particle 2 in the interference term: L, or L - 4f with a lens.
  double effective_length2() const noexcept { return lens ? L() - 4.0 * lens->focal_length : L(); }

  /// Field-path prefixed list of violated invariants; empty when valid.
  std::vector<std::string> issues(const std::string& prefix = "scenario") const;
  /// Throws ConfigError when issues() is not empty.
  void validate() const;
};

/// 10 * max(d, gamma).
double default_omega(double slit_separation, double gamma);

/// ell_sigma = sqrt(gamma^2 - epsilon^2); ConfigError if gamma <= epsilon.
double ell_sigma_from_gamma(double gamma, double slit_width);

/// Parameter regimes in which the closed-form approximations hold.
struct RegimeFlags {
  double omega_over_slit_width;
  double omega_over_ell_sigma;
  /// Both ratios at least 10.
  bool good_correlation;
  /// (Lambda1 + Lambda2) L2 / (2 Omega gamma): size of the center-of-mass
  /// spreading correction to the conditional width.
  double spreading_ratio;
  /// good_correlation and spreading_ratio <= 1e-4, where the closed form
  /// tracks the exact density pointwise to ~1e-6.
  bool closed_form_accurate;
  /// pi gamma^2 / min(lambda2 L2, lambda2 L1, lambda1 L2).
  double simplified_ratio;
  bool simplified_valid;  // simplified_ratio <= 0.2
  /// Overlap <phi_A|phi_B> = exp(-2 y0^2 / epsilon^2) of the slit modes.
  double slit_overlap;
  bool separated_slits;  // slit_overlap < 1e-4
};

RegimeFlags regime_flags(const Scenario& s);

/// Two-color reference experiment (lens-free), with Omega at its default.
Scenario ding_fig3();

}  // namespace ghostsim
