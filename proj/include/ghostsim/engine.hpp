#pragma once

// End-to-end evaluation of the ghost interference experiment:
// source -> free flight L2 -> double slit on particle 1 -> free flight to the
// detectors (optionally through a lens on particle 2) -> joint density.
//
// The exact path keeps every state as a sum of two-coordinate complex Gaussians.
// The closed-form path evaluates the good-correlation closed-form expressions and is
// kept alongside for comparison.

#include <string>
#include <vector>

#include "ghostsim/gaussian.hpp"
#include "ghostsim/pattern.hpp"
#include "ghostsim/scenario.hpp"

namespace ghostsim {

struct Uncertainties {
  double dy;  // position spread of either particle, m
  double dk;  // wavenumber spread of either particle, 1/m
};

/// dy = sqrt(Omega^2 + ell_sigma^2/4), dk = (1/2) sqrt(1/ell_sigma^2 + 1/(4 Omega^2)).
Uncertainties uncertainties(const Scenario& s);

/// Unit-norm source with w_r = ell_sigma^2 and w_c = 4 Omega^2.
CorrelatedGaussian source_correlated(const Scenario& s);
BiGaussianState build_source_state(const Scenario& s);

/// Slit modes phi_A (at +y0) and phi_B (at -y0), width parameter epsilon^2.
std::pair<GaussianTerm, GaussianTerm> slit_modes(const Scenario& s);

struct SlitResult {
  BiGaussianState post_slit;  // unit norm, two product terms
  GaussianTerm psi_a;         // unnormalized conditional packet of particle 2 (slit A)
  GaussianTerm psi_b;
  /// Real part of psi_a's complex center.
  double y0_prime;
  complex y0_prime_complex;
  /// Width parameter of psi_a.
  ComplexWidth gamma;
  /// Norm kept by the projection relative to the incoming state.
  double pass_probability;
  double mode_overlap;    // |<phi_A|phi_B>|
  double packet_overlap;  // |<psi_A|psi_B>| / (|psi_A| |psi_B|)
  std::vector<std::string> warnings;
};

/// Rank-two projection of coordinate 1 onto the slit modes followed by
/// renormalization. `arriving` must be the source evolved to the slit plane.
/// Throws PhysicsError when nothing passes.
SlitResult apply_double_slit(const BiGaussianState& arriving, const Scenario& s);

/// Closed-form conditional-packet offset y0' (ħ-free form).
double closed_form_y0_prime(const Scenario& s);
/// Closed-form conditional width Gamma, evaluated term by term as written (ħ-free form).
complex closed_form_gamma(const Scenario& s);
/// gamma^2 + i (Lambda1 + Lambda2) L2.
complex approximate_gamma(const Scenario& s);

/// Three-term good-correlation density with Gaussian envelopes and the
/// cos(theta1 y1 + theta2 y2) cross term.
struct ClosedForm {
  double y0;
  double delta1, delta2;  // envelope width parameters, m^2
  double theta1, theta2;  // rad/m
  double norm;            // |C|^2

  double operator()(double y1, double y2) const;
};

ClosedForm closed_form(const Scenario& s);

struct JointDensity {
  Scenario scenario;
  SlitResult slit;
  BiGaussianState detected;  // amplitude at the detector planes
  ClosedForm approximation;
  RegimeFlags regime;
  /// Phase gradients and offset of the exact cross term, normalized to theta1 >= 0.
  double theta1;
  double theta2;
  double phase_offset;

  /// Exact |Psi(y1, y2)|^2.
  double operator()(double y1, double y2) const;
  double closed_form(double y1, double y2) const { return approximation(y1, y2); }
  /// conj(T_i) T_j integrated over y2, for every pair of detected terms.
  std::vector<GaussianForm1> marginal_forms;

  /// Exact integral of the density over y2.
  double marginal1(double y1) const;
};

/// Runs the exact pipeline. With a lens both particles first travel L1 - f,
/// the lens acts on particle 2, then both travel f.
JointDensity joint_density(const Scenario& s);

struct FringeWidths {
  double exact;
  double simplified;
  double young_equivalent;
};

/// From the closed-form fringe-width formulas (lens-shortened when a lens is present).
FringeWidths fringe_width(const Scenario& s);

/// P(y1_fixed, y2) on the grid. Warns when the grid spans fewer than 4 periods.
Pattern coincidence_slice(const JointDensity& jd, double y1_fixed, const Axis& y2_grid);

/// (1/width) * integral of P over y1 in [center - width/2, center + width/2],
/// by composite Gauss-Legendre quadrature. width = 0 gives the slice.
Pattern bucket_average(const JointDensity& jd, double y1_center, double width, const Axis& y2_grid);

/// Integral of P over y2, sampled on the y1 grid.
Pattern marginal_particle1(const JointDensity& jd, const Axis& y1_grid);

/// Exact P on the (y1, y2) grid, row-major with y1 slow.
Pattern joint_pattern(const JointDensity& jd, const Axis& y1_grid, const Axis& y2_grid);

/// Half-width of a y2 window holding the coincidence envelope down to ~1e-14 of peak.
double default_y2_half_width(const Scenario& s);

}  // namespace ghostsim
