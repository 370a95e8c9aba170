#include "ghostsim/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr complex I{0.0, 1.0};

bool finite(complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

ComplexWidth::ComplexWidth(complex w) : w_(w) {
  if (!finite(w) || !(w.real() > 0.0))
    throw PhysicsError("complex width must have a positive real part (got " + std::to_string(w.real()) + " + " +
                       std::to_string(w.imag()) + "i)");
}

void OpticalDistance::validate() const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw PhysicsError("wavelength must be positive and finite");
  if (!(distance >= 0.0) || !std::isfinite(distance))
    throw PhysicsError("propagation distance must be non-negative and finite");
}

complex gaussian_integral(complex alpha, complex beta, complex gamma) {
  if (!(alpha.real() > 0.0) || !finite(alpha))
    throw PhysicsError("divergent Gaussian integral: quadratic coefficient has non-positive real part");
  return std::exp(0.5 * std::log(pi / alpha) + beta * beta / (4.0 * alpha) + gamma);
}

// ---------------------------------------------------------------------------
// one coordinate

complex GaussianForm1::operator()(double y) const { return std::exp(-alpha * y * y + beta * y + gamma); }

double GaussianForm1::norm_squared() const {
  const double ar = alpha.real();
  if (!(ar > 0.0)) throw PhysicsError("non-normalizable Gaussian form");
  const double br = beta.real();
  return std::sqrt(pi / (2.0 * ar)) * std::exp(br * br / (2.0 * ar) + 2.0 * gamma.real());
}

complex GaussianTerm::operator()(double y) const {
  const double u = y - center;
  return amplitude * std::exp(-u * u / width.value() + I * (phase_gradient * y));
}

double GaussianTerm::norm_squared() const {
  const double re_inv = (1.0 / width.value()).real();
  return std::norm(amplitude) * std::sqrt(pi / (2.0 * re_inv));
}

complex GaussianTerm::complex_center() const { return center + I * phase_gradient * width.value() / 2.0; }

GaussianForm1 GaussianTerm::form() const {
  const complex a = 1.0 / width.value();
  return {a, 2.0 * center * a + I * phase_gradient, std::log(amplitude) - center * center * a};
}

GaussianTerm GaussianTerm::from_form(const GaussianForm1& f) {
  if (!(f.alpha.real() > 0.0) || !finite(f.alpha)) throw PhysicsError("Gaussian form is not normalizable");
  const double mu = f.beta.real() / (2.0 * f.alpha.real());
  const double kappa = f.beta.imag() - 2.0 * mu * f.alpha.imag();
  return {std::exp(f.gamma + mu * mu * f.alpha), mu, ComplexWidth{1.0 / f.alpha}, kappa};
}

GaussianTerm normalized_packet(double center, double width) {
  if (!(width > 0.0)) throw PhysicsError("packet width must be positive");
  return {std::pow(2.0 / pi, 0.25) / std::sqrt(width), center, ComplexWidth{width * width, 0.0}, 0.0};
}

complex overlap(const GaussianForm1& a, const GaussianForm1& b) {
  return gaussian_integral(std::conj(a.alpha) + b.alpha, std::conj(a.beta) + b.beta, std::conj(a.gamma) + b.gamma);
}

complex overlap(const GaussianTerm& a, const GaussianTerm& b) { return overlap(a.form(), b.form()); }

GaussianForm1 evolve_free(const GaussianForm1& f, const OpticalDistance& od) {
  const double s = od.increment();
  const complex d = 1.0 + I * s * f.alpha;
  return {f.alpha / d, f.beta / d, f.gamma + I * s * f.beta * f.beta / (4.0 * d) - 0.5 * std::log(d)};
}

GaussianTerm evolve_free(const GaussianTerm& term, const OpticalDistance& od) {
  od.validate();
  if (od.distance == 0.0) return term;
  // Width bookkeeping done directly so that w -> w + i*s is exact.
  const double s = od.increment();
  const complex w = term.width.value();
  const complex w_new = w + I * s;
  const double center = term.center + term.phase_gradient * s / 2.0;
  const double k = term.phase_gradient;
  const complex amp = term.amplitude * std::sqrt(w / w_new) * std::exp(-I * (k * k * s / 4.0));
  return {amp, center, ComplexWidth{w_new}, k};
}

GaussianTerm lens_transform(const GaussianTerm& term, const OpticalDistance& od, double focal_length) {
  if (!(focal_length > 0.0) || !std::isfinite(focal_length)) throw PhysicsError("focal length must be positive");
  if (!(od.wavelength > 0.0)) throw PhysicsError("wavelength must be positive");
  const double lam = od.rescaled_wavelength();
  const complex w = term.width.value();
  const double sigma2 = w.real();
  const double x = w.imag();
  const double x_expected = lam * od.distance;
  if (std::abs(x - x_expected) > 1e-9 * std::max({std::abs(x), std::abs(x_expected), sigma2}))
    throw PhysicsError("lens: width is inconsistent with the supplied propagation distance");

  const double x_new = lam * (od.distance - 4.0 * focal_length);
  const double r = sigma2 + x * x / sigma2;
  const double disc = r * r - 4.0 * x_new * x_new;
  if (disc < 0.0) throw PhysicsError("lens condition unsatisfiable for these parameters");
  const double upper = 0.5 * (r + std::sqrt(disc));
  const double lower = x_new * x_new / upper;
  const double du = std::abs(upper - sigma2) / sigma2;
  const double dl = std::abs(lower - sigma2) / sigma2;
  const double sigma_t2 = (dl < du) ? lower : upper;
  if (!(sigma_t2 > 0.0)) throw PhysicsError("lens condition unsatisfiable for these parameters");

  const double sigma = std::sqrt(sigma2);
  const double sigma_t = std::sqrt(sigma_t2);
  const complex before = std::sqrt(complex{sigma, x / sigma});
  const complex after = std::sqrt(complex{sigma_t, x_new / sigma_t});

  // Written as p * exp(-(y - m)^2 / w) the packet keeps its complex center m;
  // |p| is then fixed by the norm.
  const complex m = term.complex_center();
  const complex w_new{sigma_t2, x_new};
  const double k = term.phase_gradient;
  const complex p = term.amplitude * std::exp(-I * k * term.center + k * k * w / 4.0) * before / after;
  GaussianTerm out = GaussianTerm::from_form({1.0 / w_new, 2.0 * m / w_new, std::log(p) - m * m / w_new});
  out.amplitude *= std::sqrt(term.norm_squared() / out.norm_squared());
  return out;
}

complex GaussianSum::operator()(double y) const {
  complex acc{0.0};
  for (const auto& t : terms) acc += t(y);
  return acc;
}

double GaussianSum::norm_squared() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc += terms[i].norm_squared();
    for (std::size_t j = i + 1; j < terms.size(); ++j) acc += 2.0 * overlap(terms[i], terms[j]).real();
  }
  return acc;
}

const GaussianTerm& GaussianSum::single() const {
  if (terms.size() != 1) throw std::logic_error("GaussianSum::single: sum has " + std::to_string(terms.size()) + " terms");
  return terms.front();
}

// ---------------------------------------------------------------------------
// two coordinates

complex GaussianForm2::operator()(double y1, double y2) const {
  return std::exp(-(a11 * y1 * y1 + 2.0 * a12 * y1 * y2 + a22 * y2 * y2) + b1 * y1 + b2 * y2 + c);
}

GaussianForm2 GaussianForm2::product(const GaussianForm1& g1, const GaussianForm1& g2) {
  return {g1.alpha, complex{0.0}, g2.alpha, g1.beta, g2.beta, g1.gamma + g2.gamma};
}

std::pair<GaussianForm1, GaussianForm1> GaussianForm2::factor() const {
  if (!separable()) throw std::logic_error("GaussianForm2::factor: form couples the two coordinates");
  return {GaussianForm1{a11, b1, c}, GaussianForm1{a22, b2, complex{0.0}}};
}

GaussianForm2 conj_product(const GaussianForm2& a, const GaussianForm2& b) {
  return {std::conj(a.a11) + b.a11, std::conj(a.a12) + b.a12, std::conj(a.a22) + b.a22,
          std::conj(a.b1) + b.b1,   std::conj(a.b2) + b.b2,   std::conj(a.c) + b.c};
}

GaussianForm1 integrate_out(const GaussianForm2& f, Coordinate coordinate) {
  if (coordinate == Coordinate::first) {
    if (!(f.a11.real() > 0.0)) throw PhysicsError("divergent Gaussian integral over y1");
    return {f.a22 - f.a12 * f.a12 / f.a11, f.b2 - f.b1 * f.a12 / f.a11,
            f.c + f.b1 * f.b1 / (4.0 * f.a11) + 0.5 * std::log(pi / f.a11)};
  }
  if (!(f.a22.real() > 0.0)) throw PhysicsError("divergent Gaussian integral over y2");
  return {f.a11 - f.a12 * f.a12 / f.a22, f.b1 - f.b2 * f.a12 / f.a22,
          f.c + f.b2 * f.b2 / (4.0 * f.a22) + 0.5 * std::log(pi / f.a22)};
}

double GaussianForm2::norm_squared() const {
  const GaussianForm1 rest = integrate_out(conj_product(*this, *this), Coordinate::first);
  return gaussian_integral(rest.alpha, rest.beta, rest.gamma).real();
}

GaussianForm2 evolve(const GaussianForm2& f, const OpticalDistance& od1, const OpticalDistance& od2) {
  od1.validate();
  od2.validate();
  GaussianForm2 g = f;
  if (const double s = od1.increment(); s != 0.0) {
    const complex d = 1.0 + I * s * g.a11;
    const GaussianForm2 h = g;
    g.a11 = h.a11 / d;
    g.a12 = h.a12 / d;
    g.a22 = h.a22 - I * s * h.a12 * h.a12 / d;
    g.b1 = h.b1 / d;
    g.b2 = h.b2 - I * s * h.b1 * h.a12 / d;
    g.c = h.c + I * s * h.b1 * h.b1 / (4.0 * d) - 0.5 * std::log(d);
  }
  if (const double s = od2.increment(); s != 0.0) {
    const complex d = 1.0 + I * s * g.a22;
    const GaussianForm2 h = g;
    g.a22 = h.a22 / d;
    g.a12 = h.a12 / d;
    g.a11 = h.a11 - I * s * h.a12 * h.a12 / d;
    g.b2 = h.b2 / d;
    g.b1 = h.b1 - I * s * h.b2 * h.a12 / d;
    g.c = h.c + I * s * h.b2 * h.b2 / (4.0 * d) - 0.5 * std::log(d);
  }
  return g;
}

void CorrelatedGaussian::validate() const {
  if (!((1.0 / relative.value()).real() > 0.0) || !((1.0 / center_of_mass.value()).real() > 0.0))
    throw PhysicsError("correlated Gaussian is not normalizable along both principal axes");
}

double CorrelatedGaussian::norm_squared() const {
  // dy1 dy2 = dr dc / 2 with r = y1 - y2, c = y1 + y2.
  const double pr = (1.0 / relative.value()).real();
  const double pc = (1.0 / center_of_mass.value()).real();
  return 0.5 * std::norm(amplitude) * std::sqrt(pi / (2.0 * pr)) * std::sqrt(pi / (2.0 * pc));
}

GaussianForm2 CorrelatedGaussian::form() const {
  const complex p = 1.0 / relative.value();
  const complex q = 1.0 / center_of_mass.value();
  return {p + q, q - p, p + q, complex{0.0}, complex{0.0}, std::log(amplitude)};
}

CorrelatedGaussian evolve_correlated(const CorrelatedGaussian& state, const OpticalDistance& od1,
                                     const OpticalDistance& od2) {
  od1.validate();
  od2.validate();
  state.validate();
  const double l = od1.distance;
  if (std::abs(od1.distance - od2.distance) > 1e-12 * std::max(od1.distance, od2.distance))
    throw PhysicsError("evolve_correlated: both particles must travel the same distance");
  const double lam1 = od1.rescaled_wavelength();
  const double lam2 = od2.rescaled_wavelength();
  const complex wr = state.relative.value();
  const complex wc = state.center_of_mass.value();
  const complex wr_new = wr + I * (lam1 + lam2) * l;
  const complex wc_new = wc + I * (lam1 * lam2 / (lam1 + lam2)) * l;
  const complex amp = state.amplitude * std::sqrt(wr / wr_new) * std::sqrt(wc / wc_new);
  return {amp, ComplexWidth{wr_new}, ComplexWidth{wc_new}};
}

// ---------------------------------------------------------------------------

BiGaussianState BiGaussianState::product(const GaussianTerm& g1, const GaussianTerm& g2, complex amplitude) {
  GaussianForm2 f = GaussianForm2::product(g1.form(), g2.form());
  f.c += std::log(amplitude);
  return BiGaussianState{{f}};
}

BiGaussianState BiGaussianState::correlated(const CorrelatedGaussian& state) {
  state.validate();
  return BiGaussianState{{state.form()}};
}

complex BiGaussianState::operator()(double y1, double y2) const {
  complex acc{0.0};
  for (const auto& t : terms_) acc += t(y1, y2);
  return acc;
}

complex inner_product(const BiGaussianState& a, const BiGaussianState& b) {
  complex acc{0.0};
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms()) {
      const GaussianForm1 rest = integrate_out(conj_product(ta, tb), Coordinate::first);
      acc += gaussian_integral(rest.alpha, rest.beta, rest.gamma);
    }
  return acc;
}

double BiGaussianState::norm_squared() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    acc += terms_[i].norm_squared();
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      const GaussianForm1 rest = integrate_out(conj_product(terms_[i], terms_[j]), Coordinate::first);
      acc += 2.0 * gaussian_integral(rest.alpha, rest.beta, rest.gamma).real();
    }
  }
  return acc;
}

BiGaussianState BiGaussianState::scaled(complex factor) const {
  BiGaussianState out = *this;
  const complex lf = std::log(factor);
  for (auto& t : out.terms_) t.c += lf;
  return out;
}

BiGaussianState BiGaussianState::normalized() const {
  const double n = norm_squared();
  if (!(n > 0.0) || !std::isfinite(n)) throw PhysicsError("cannot normalize a zero or non-normalizable state");
  return scaled(1.0 / std::sqrt(n));
}

bool BiGaussianState::separable() const noexcept {
  for (const auto& t : terms_)
    if (!t.separable()) return false;
  return true;
}

BiGaussianState evolve(const BiGaussianState& state, const OpticalDistance& od1, const OpticalDistance& od2) {
  std::vector<GaussianForm2> out;
  out.reserve(state.size());
  for (const auto& t : state.terms()) out.push_back(evolve(t, od1, od2));
  return BiGaussianState{std::move(out)};
}

GaussianSum project_mode(const BiGaussianState& state, const GaussianTerm& mode, Coordinate coordinate) {
  const GaussianForm1 m = mode.form();
  GaussianSum out;
  out.terms.reserve(state.size());
  for (GaussianForm2 t : state.terms()) {
    if (coordinate == Coordinate::first) {
      t.a11 += std::conj(m.alpha);
      t.b1 += std::conj(m.beta);
    } else {
      t.a22 += std::conj(m.alpha);
      t.b2 += std::conj(m.beta);
    }
    t.c += std::conj(m.gamma);
    out.terms.push_back(GaussianTerm::from_form(integrate_out(t, coordinate)));
  }
  return out;
}

BiGaussianState lens_transform(const BiGaussianState& state, Coordinate coordinate, double wavelength,
                               double focal_length) {
  std::vector<GaussianForm2> out;
  out.reserve(state.size());
  for (const auto& t : state.terms()) {
    if (!t.separable()) throw PhysicsError("lens: term couples the two coordinates; no per-factor decomposition");
    auto [f1, f2] = t.factor();
    GaussianForm1& target = (coordinate == Coordinate::first) ? f1 : f2;
    const GaussianTerm term = GaussianTerm::from_form(target);
    const double distance = term.width.imag() / (wavelength / pi);
    target = lens_transform(term, OpticalDistance{wavelength, distance}, focal_length).form();
    out.push_back(GaussianForm2::product(f1, f2));
  }
  return BiGaussianState{std::move(out)};
}

}  // namespace ghostsim
