#pragma once

// Exact algebra for complex Gaussian one- and two-particle wavefunctions.
//
// Every width is a complex number w with units of length^2 appearing as
// exp(-(y - mu)^2 / w). Free propagation over a distance L at wavelength
// lambda adds i*lambda*L/pi to w. Internally states are kept in quadratic
// form exp(-alpha y^2 + beta y + gamma), which is closed under products,
// projections and propagation and avoids overflow of explicit prefactors.

#include <complex>
#include <numbers>
#include <utility>
#include <vector>

namespace ghostsim {

using complex = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

enum class Coordinate { first = 1, second = 2 };

/// Complex width parameter w (length^2). Re(w) > 0.
class ComplexWidth {
 public:
  explicit ComplexWidth(complex w);
  ComplexWidth(double re, double im) : ComplexWidth(complex{re, im}) {}

  complex value() const noexcept { return w_; }
  double real() const noexcept { return w_.real(); }
  double imag() const noexcept { return w_.imag(); }

  friend bool operator==(const ComplexWidth&, const ComplexWidth&) = default;

 private:
  complex w_;
};

/// Propagation distance travelled at a given wavelength.
struct OpticalDistance {
  double wavelength;  // m
  double distance;    // m

  /// lambda / pi, the rescaled wavelength.
  double rescaled_wavelength() const noexcept { return wavelength / pi; }
  /// Imaginary increment lambda*L/pi added to a width by free evolution.
  double increment() const noexcept { return wavelength * distance / pi; }
  /// Throws PhysicsError unless lambda > 0 and L >= 0.
  void validate() const;
};

/// One-dimensional quadratic form exp(-alpha y^2 + beta y + gamma).
struct GaussianForm1 {
  complex alpha;
  complex beta{0.0};
  complex gamma{0.0};

  complex operator()(double y) const;
  double norm_squared() const;
};

/// A * exp(-(y - center)^2 / w + i * phase_gradient * y).
struct GaussianTerm {
  complex amplitude;
  double center;
  ComplexWidth width;
  double phase_gradient = 0.0;

  complex operator()(double y) const;
  double norm_squared() const;
  /// Complex center m such that the term is proportional to exp(-(y-m)^2/w).
  complex complex_center() const;

  GaussianForm1 form() const;
  static GaussianTerm from_form(const GaussianForm1& form);
};

/// Unit-norm packet exp(-(y-center)^2/width^2) with prefactor (2/pi)^(1/4)/sqrt(width).
GaussianTerm normalized_packet(double center, double width);

/// <a|b> = integral of conj(a) * b.
complex overlap(const GaussianTerm& a, const GaussianTerm& b);
complex overlap(const GaussianForm1& a, const GaussianForm1& b);

/// Integral of exp(-alpha y^2 + beta y + gamma) over the real line.
/// Throws PhysicsError when Re(alpha) <= 0.
complex gaussian_integral(complex alpha, complex beta, complex gamma);

GaussianForm1 evolve_free(const GaussianForm1& form, const OpticalDistance& od);
/// Free evolution: w -> w + i*lambda*L/pi; norm exactly preserved. A nonzero
/// phase gradient makes the center drift by phase_gradient * lambda*L / (2*pi).
GaussianTerm evolve_free(const GaussianTerm& term, const OpticalDistance& od);

/// Converging-lens unitary on a packet whose width is w = sigma^2 + i*Lambda*L,
/// L being the distance travelled since its waist (`od.distance`). Returns
/// width sigma_t^2 + i*Lambda*(L - 4f) where sigma_t^2 solves
///   sigma_t^2 + Lambda^2 (L-4f)^2 / sigma_t^2 = sigma^2 + Lambda^2 L^2 / sigma^2
/// on the branch continuous with sigma_t = sigma at f = 0. The complex center
/// (see complex_center) is kept and the norm is preserved.
GaussianTerm lens_transform(const GaussianTerm& term, const OpticalDistance& od, double focal_length);

/// Sum of Gaussian terms of one coordinate.
struct GaussianSum {
  std::vector<GaussianTerm> terms;

  complex operator()(double y) const;
  double norm_squared() const;
  /// The only term; throws std::logic_error if there is not exactly one.
  const GaussianTerm& single() const;
};

/// exp(-[a11 y1^2 + 2 a12 y1 y2 + a22 y2^2] + b1 y1 + b2 y2 + c).
struct GaussianForm2 {
  complex a11, a12, a22;
  complex b1{0.0}, b2{0.0};
  complex c{0.0};

  complex operator()(double y1, double y2) const;
  double norm_squared() const;
  bool separable() const noexcept { return a12 == complex{0.0}; }
  /// Factors of a separable form; throws std::logic_error otherwise.
  std::pair<GaussianForm1, GaussianForm1> factor() const;

  static GaussianForm2 product(const GaussianForm1& g1, const GaussianForm1& g2);
};

/// conj(a) * b as a single quadratic form.
GaussianForm2 conj_product(const GaussianForm2& a, const GaussianForm2& b);
/// Integrates the form over one coordinate, leaving a form of the other.
GaussianForm1 integrate_out(const GaussianForm2& form, Coordinate coordinate);
/// Exact per-axis free evolution of a general two-coordinate Gaussian.
GaussianForm2 evolve(const GaussianForm2& form, const OpticalDistance& od1, const OpticalDistance& od2);

/// amplitude * exp(-(y1-y2)^2/w_r) * exp(-(y1+y2)^2/w_c).
struct CorrelatedGaussian {
  complex amplitude;
  ComplexWidth relative;
  ComplexWidth center_of_mass;

  /// Throws PhysicsError unless Re(1/w_r) > 0 and Re(1/w_c) > 0.
  void validate() const;
  double norm_squared() const;
  GaussianForm2 form() const;
};

/// Separable approximate rule: w_r gains i(Lambda1+Lambda2)L and w_c gains
/// i*Lambda1*Lambda2/(Lambda1+Lambda2)*L. The w_c increment is the total-mass
/// one although w_c multiplies (y1+y2)^2, and the coupling between the two
/// channels is dropped, so the rule agrees with exact evolution only when w_c
/// is broad enough for its spreading to be negligible. Both distances must be
/// equal. Norm preserved.
CorrelatedGaussian evolve_correlated(const CorrelatedGaussian& state, const OpticalDistance& od1,
                                     const OpticalDistance& od2);

/// Sum of two-coordinate Gaussian terms.
class BiGaussianState {
 public:
  BiGaussianState() = default;
  explicit BiGaussianState(std::vector<GaussianForm2> terms) : terms_(std::move(terms)) {}

  static BiGaussianState product(const GaussianTerm& g1, const GaussianTerm& g2, complex amplitude = 1.0);
  static BiGaussianState correlated(const CorrelatedGaussian& state);

  const std::vector<GaussianForm2>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  complex operator()(double y1, double y2) const;
  double norm_squared() const;
  /// Copy scaled to unit norm. Throws PhysicsError for a zero state.
  BiGaussianState normalized() const;
  BiGaussianState scaled(complex factor) const;
  bool separable() const noexcept;

  void add(const GaussianForm2& term) { terms_.push_back(term); }

 private:
  std::vector<GaussianForm2> terms_;
};

/// <a|b> over both coordinates.
complex inner_product(const BiGaussianState& a, const BiGaussianState& b);

BiGaussianState evolve(const BiGaussianState& state, const OpticalDistance& od1, const OpticalDistance& od2);

/// Conditional (unnormalized) wavefunction of the other coordinate:
/// integral of conj(mode(y_c)) * state(y1, y2) over the chosen coordinate.
GaussianSum project_mode(const BiGaussianState& state, const GaussianTerm& mode, Coordinate coordinate);

/// Applies lens_transform to the chosen factor of every (separable) term. The
/// propagation history of each factor is read off its own width as
/// L = Im(w) / Lambda.
BiGaussianState lens_transform(const BiGaussianState& state, Coordinate coordinate, double wavelength,
                               double focal_length);

}  // namespace ghostsim
