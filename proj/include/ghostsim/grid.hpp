#pragma once

// Brute-force two-coordinate wavefunction on a periodic (y1, y2) grid.
//
// Free propagation multiplies the 2D spectrum by exp(-i (s1 k1^2 + s2 k2^2) / 4)
// with s = lambda L / pi. Slit projection uses quadrature inner products. No
// Gaussian structure is assumed except where a lens step explicitly asks for
// a Gaussian decomposition.

#include <cstddef>
#include <string>
#include <vector>

#include "ghostsim/engine.hpp"
#include "ghostsim/gaussian.hpp"
#include "ghostsim/pattern.hpp"
#include "ghostsim/scenario.hpp"

namespace ghostsim {

/// n1 x n2 samples at y = -extent + i * (2 extent / n), i = 0..n-1.
struct GridSpec {
  std::size_t n1 = 2048;
  std::size_t n2 = 2048;
  double extent1 = 0.0;  // half-width, m
  double extent2 = 0.0;

  double dy1() const noexcept { return 2.0 * extent1 / static_cast<double>(n1); }
  double dy2() const noexcept { return 2.0 * extent2 / static_cast<double>(n2); }
  double y1(std::size_t i) const noexcept { return -extent1 + static_cast<double>(i) * dy1(); }
  double y2(std::size_t j) const noexcept { return -extent2 + static_cast<double>(j) * dy2(); }
  Axis axis1() const { return {-extent1, -extent1 + static_cast<double>(n1 - 1) * dy1(), n1}; }
  Axis axis2() const { return {-extent2, -extent2 + static_cast<double>(n2 - 1) * dy2(), n2}; }

  /// Throws ResourceError unless sizes are powers of two (>= 8) and extents positive.
  void validate() const;
  /// Bytes needed by a pipeline run (three complex arrays).
  std::size_t memory_bytes() const noexcept { return 3 * 16 * n1 * n2; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct NormRecord {
  std::string stage;
  double norm;
};

struct GridState {
  GridSpec spec;
  std::vector<complex> values;  // row-major, y1 slow
  std::vector<NormRecord> norm_history;

  complex at(std::size_t i, std::size_t j) const { return values[i * spec.n2 + j]; }
  /// Sum |psi|^2 dy1 dy2.
  double norm() const;
};

/// Extents and steps a scenario needs: every pipeline stage must fit within the
/// extent with 6.5 standard deviations of margin, in position and in spectrum.
struct GridRequirement {
  double extent1, extent2;  // minimum half-widths, m
  double max_step1, max_step2;  // maximum sample spacing, m
};

GridRequirement grid_requirement(const Scenario& s);

/// Smallest adequate extents for the requested sizes. Throws ResourceError when
/// the sampling cannot resolve the spectrum or the memory cap is exceeded.
GridSpec preflight(const Scenario& s, std::size_t n1, std::size_t n2, std::size_t memory_cap = std::size_t{1} << 30);

/// Samples the analytic state. Throws ResourceError when the grid truncates it
/// (norm off by more than 1e-9).
GridState discretize(const BiGaussianState& state, const GridSpec& spec, const std::string& stage = "discretize");

/// Spectral free propagation. Throws ResourceError when the state reaches the
/// spectral or spatial edges of the grid (aliasing risk).
GridState propagate(const GridState& gs, const OpticalDistance& od1, const OpticalDistance& od2);

struct SlitProjection {
  GridState state;  // renormalized
  double passed;    // kept norm / incoming norm
  std::vector<complex> psi_a;  // conditional packets of particle 2, on the y2 grid
  std::vector<complex> psi_b;
};

/// Rank-two projector on coordinate 1 by quadrature. Throws PhysicsError
/// ("state misses the slits") when passed < 1e-12.
SlitProjection slit_project(const GridState& gs, const GaussianTerm& phi_a, const GaussianTerm& phi_b);

/// Complex-centre lens map applied to a Gaussian decomposition of the grid state. The
/// decomposition must reproduce the grid to 1e-6 of its peak amplitude, else
/// PhysicsError.
GridState lens_apply(const GridState& gs, const BiGaussianState& decomposition, Coordinate coordinate,
                     double wavelength, double focal_length);

/// Alternative thin-lens model: multiply by exp(-i y^2 / (Lambda f)) in the chosen
/// coordinate. f = infinity is the identity.
GridState lens_apply_quadratic(const GridState& gs, Coordinate coordinate, double wavelength, double focal_length);

/// |psi|^2 as a 2D pattern (x = y1, y = y2).
Pattern density(const GridState& gs);

/// Gaussian parameters recovered from a sampled 1D wavefunction: center from the
/// first moment, Re(1/w) from the second moment, Im(1/w) and the phase gradient
/// from a weighted quadratic fit of the unwrapped phase.
struct PacketFit {
  double center = 0.0;
  ComplexWidth width{1.0, 0.0};
  double phase_gradient = 0.0;
  complex complex_center() const { return center + complex{0.0, 1.0} * phase_gradient * width.value() / 2.0; }
};

PacketFit fit_packet(const std::vector<complex>& samples, const Axis& axis);

struct OracleRun {
  GridSpec spec;
  Pattern joint;  // final density
  double passed = 0.0;
  PacketFit fit_a;
  PacketFit fit_b;
  double packet_overlap = 0.0;  // |<psi_A|psi_B>| / (|psi_A| |psi_B|) on the grid
  std::vector<NormRecord> norm_history;
  /// Largest |norm - 1| over all stages except the slit projection record.
  double norm_drift = 0.0;
};

/// Full grid pipeline for the scenario. The complex-centre lens map needs the Gaussian
/// decomposition at the lens plane, which is taken from the analytic engine.
OracleRun run_oracle(const Scenario& s, const GridSpec& spec);

}  // namespace ghostsim
