#include "ghostsim/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr complex I{0.0, 1.0};

std::string format_g(const char* fmt, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                       -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

}  // namespace

Uncertainties uncertainties(const Scenario& s) {
  const double l = s.source.ell_sigma;
  const double o = s.source.omega;
  return {std::sqrt(o * o + l * l / 4.0), 0.5 * std::sqrt(1.0 / (l * l) + 1.0 / (4.0 * o * o))};
}

CorrelatedGaussian source_correlated(const Scenario& s) {
  const double l = s.source.ell_sigma;
  const double o = s.source.omega;
  CorrelatedGaussian cg{1.0, ComplexWidth{l * l, 0.0}, ComplexWidth{4.0 * o * o, 0.0}};
  cg.amplitude = 1.0 / std::sqrt(cg.norm_squared());
  return cg;
}

BiGaussianState build_source_state(const Scenario& s) {
  s.validate();
  return BiGaussianState::correlated(source_correlated(s));
}

std::pair<GaussianTerm, GaussianTerm> slit_modes(const Scenario& s) {
  return {normalized_packet(s.y0(), s.slit_width), normalized_packet(-s.y0(), s.slit_width)};
}

SlitResult apply_double_slit(const BiGaussianState& arriving, const Scenario& s) {
  const auto [phi_a, phi_b] = slit_modes(s);
  SlitResult r{.post_slit = {},
               .psi_a = project_mode(arriving, phi_a, Coordinate::first).single(),
               .psi_b = project_mode(arriving, phi_b, Coordinate::first).single(),
               .y0_prime = 0.0,
               .y0_prime_complex = 0.0,
               .gamma = ComplexWidth{1.0, 0.0},
               .pass_probability = 0.0,
               .mode_overlap = std::abs(overlap(phi_a, phi_b)),
               .packet_overlap = 0.0,
               .warnings = {}};

  BiGaussianState kept = BiGaussianState::product(phi_a, r.psi_a);
  kept.add(BiGaussianState::product(phi_b, r.psi_b).terms().front());
  const double incoming = arriving.norm_squared();
  const double kept_norm = kept.norm_squared();
  r.pass_probability = kept_norm / incoming;
  if (!(r.pass_probability > 1e-12)) throw PhysicsError("state misses the slits");
  r.post_slit = kept.scaled(1.0 / std::sqrt(kept_norm));

  r.y0_prime_complex = r.psi_a.complex_center();
  r.y0_prime = r.y0_prime_complex.real();
  r.gamma = r.psi_a.width;
  r.packet_overlap =
      std::abs(overlap(r.psi_a, r.psi_b)) / std::sqrt(r.psi_a.norm_squared() * r.psi_b.norm_squared());
  if (r.mode_overlap > 1e-6)
    r.warnings.push_back("slit modes overlap: |<phi_A|phi_B>| = " + format_g("%.3e", r.mode_overlap) +
                         " (modes are not orthogonalized)");
  return r;
}

double closed_form_y0_prime(const Scenario& s) {
  const double l2 = s.source.ell_sigma * s.source.ell_sigma;
  const double o2 = s.source.omega * s.source.omega;
  const double e2 = s.slit_width * s.slit_width;
  const double q = 4.0 * o2 / l2;
  return s.y0() / ((q + 1.0) / (q - 1.0) + 4.0 * e2 / (4.0 * o2 - l2));
}

complex closed_form_gamma(const Scenario& s) {
  const double l2 = s.source.ell_sigma * s.source.ell_sigma;
  const double o2 = s.source.omega * s.source.omega;
  const double e2 = s.slit_width * s.slit_width;
  const double lam1 = s.lambda1 / pi;
  const double lam2 = s.lambda2 / pi;
  // 2ħt0/M and 2ħt0/µ in wavelength form.
  const double total = lam1 * lam2 / (lam1 + lam2) * s.L2;
  const double reduced = (lam1 + lam2) * s.L2;
  const complex num = l2 * (1.0 + (e2 + I * total) / (4.0 * o2)) + e2 + I * reduced + I * (total + reduced) / (4.0 * o2);
  const complex den = 1.0 + e2 / o2 + I * (total + reduced) / (4.0 * o2) + l2 / (4.0 * o2);
  return num / den;
}

complex approximate_gamma(const Scenario& s) { return {s.gamma2(), (s.lambda1 + s.lambda2) / pi * s.L2}; }

double ClosedForm::operator()(double y1, double y2) const {
  const double a = y1 - y0, b = y1 + y0, c = y2 - y0, e = y2 + y0;
  const double t1 = std::exp(-2.0 * a * a / delta1 - 2.0 * c * c / delta2);
  const double t2 = std::exp(-2.0 * b * b / delta1 - 2.0 * e * e / delta2);
  const double t3 = 2.0 * std::exp(-2.0 * (y1 * y1 + y0 * y0) / delta1 - 2.0 * (y2 * y2 + y0 * y0) / delta2) *
                    std::cos(theta1 * y1 + theta2 * y2);
  return norm * (t1 + t2 + t3);
}

ClosedForm closed_form(const Scenario& s) {
  const double e2 = s.slit_width * s.slit_width;
  const double g2 = s.gamma2();
  const double x1 = s.lambda1 * s.L1 / pi;
  const double x2 = (s.lambda2 * s.effective_length2() + s.lambda1 * s.L2) / pi;
  ClosedForm c{};
  c.y0 = s.y0();
  c.delta1 = e2 + x1 * x1 / e2;
  c.delta2 = g2 + x2 * x2 / g2;
  c.theta1 = 2.0 * s.slit_separation * x1 / (e2 * e2 + x1 * x1);
  c.theta2 = 2.0 * s.slit_separation * x2 / (g2 * g2 + x2 * x2);
  c.norm = 1.0 / (pi * std::sqrt(c.delta1 * c.delta2));
  return c;
}

double JointDensity::operator()(double y1, double y2) const { return std::norm(detected(y1, y2)); }

double JointDensity::marginal1(double y1) const {
  double acc = 0.0;
  for (const auto& f : marginal_forms) acc += f(y1).real();
  return acc;
}

JointDensity joint_density(const Scenario& s) {
  s.validate();
  const BiGaussianState source = build_source_state(s);
  const BiGaussianState arriving = evolve(source, {s.lambda1, s.L2}, {s.lambda2, s.L2});

  JointDensity jd{.scenario = s,
                  .slit = apply_double_slit(arriving, s),
                  .detected = {},
                  .approximation = closed_form(s),
                  .regime = regime_flags(s),
                  .theta1 = 0.0,
                  .theta2 = 0.0,
                  .phase_offset = 0.0,
                  .marginal_forms = {}};

  if (s.lens) {
    const double f = s.lens->focal_length;
    BiGaussianState st = evolve(jd.slit.post_slit, {s.lambda1, s.L1 - f}, {s.lambda2, s.L1 - f});
    st = lens_transform(st, Coordinate::second, s.lambda2, f);
    jd.detected = evolve(st, {s.lambda1, f}, {s.lambda2, f});
  } else {
    jd.detected = evolve(jd.slit.post_slit, {s.lambda1, s.L1}, {s.lambda2, s.L1});
  }

  const auto& terms = jd.detected.terms();
  const GaussianForm2 cross = conj_product(terms[0], terms[1]);
  double sign = cross.b1.imag() < 0.0 ? -1.0 : 1.0;
  if (cross.b1.imag() == 0.0 && cross.b2.imag() < 0.0) sign = -1.0;
  jd.theta1 = sign * cross.b1.imag();
  jd.theta2 = sign * cross.b2.imag();
  jd.phase_offset = sign * cross.c.imag();

  for (const auto& a : terms)
    for (const auto& b : terms) jd.marginal_forms.push_back(integrate_out(conj_product(a, b), Coordinate::second));
  return jd;
}

FringeWidths fringe_width(const Scenario& s) {
  const double y = s.lambda2 * s.effective_length2() + s.lambda1 * s.L2;
  const double d = s.slit_separation;
  const double g2 = s.gamma2();
  const double shortened_d = s.lens ? s.D() - 4.0 * s.lens->focal_length : s.D();
  return {y / d + g2 * g2 * pi * pi / (d * y), y / d, s.lambda2 * shortened_d / d};
}

Pattern coincidence_slice(const JointDensity& jd, double y1_fixed, const Axis& y2_grid) {
  y2_grid.validate();
  Pattern p;
  p.label = "coincidence";
  p.x = y2_grid;
  p.fixed_y1 = y1_fixed;
  p.values.resize(y2_grid.count);
  for (std::size_t j = 0; j < y2_grid.count; ++j) p.values[j] = jd(y1_fixed, y2_grid[j]);
  const double periods = (y2_grid.stop - y2_grid.start) * std::abs(jd.theta2) / (2.0 * pi);
  if (periods < 4.0)
    p.warnings.push_back("y2 grid spans only " + format_g("%.2f", periods) + " fringe periods (at least 4 advised)");
  return p;
}

Pattern bucket_average(const JointDensity& jd, double y1_center, double width, const Axis& y2_grid) {
  if (!(width >= 0.0) || !std::isfinite(width)) throw PhysicsError("bucket width must be non-negative");
  if (width == 0.0) {
    Pattern p = coincidence_slice(jd, y1_center, y2_grid);
    p.label = "bucket";
    p.window = 0.0;
    return p;
  }
  y2_grid.validate();
  const double period = std::abs(jd.theta1) > 0.0 ? 2.0 * pi / std::abs(jd.theta1) : width;
  const double panel_limit = std::min(period / 8.0, std::sqrt(jd.approximation.delta1) / 4.0);
  const std::size_t panels = static_cast<std::size_t>(std::ceil(width / panel_limit));
  const double h = width / static_cast<double>(panels);
  const double lo = y1_center - width / 2.0;

  std::vector<double> nodes, weights;
  nodes.reserve(panels * kNodes.size());
  weights.reserve(panels * kNodes.size());
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = lo + (static_cast<double>(k) + 0.5) * h;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      nodes.push_back(mid + 0.5 * h * kNodes[q]);
      weights.push_back(0.5 * h * kWeights[q] / width);
    }
  }

  Pattern p;
  p.label = "bucket";
  p.x = y2_grid;
  p.fixed_y1 = y1_center;
  p.window = width;
  p.values.resize(y2_grid.count);
  for (std::size_t j = 0; j < y2_grid.count; ++j) {
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) acc += weights[q] * jd(nodes[q], y2_grid[j]);
    p.values[j] = acc;
  }
  return p;
}

Pattern marginal_particle1(const JointDensity& jd, const Axis& y1_grid) {
  y1_grid.validate();
  Pattern p;
  p.label = "marginal1";
  p.x = y1_grid;
  p.values.resize(y1_grid.count);
  for (std::size_t i = 0; i < y1_grid.count; ++i) p.values[i] = jd.marginal1(y1_grid[i]);
  return p;
}

Pattern joint_pattern(const JointDensity& jd, const Axis& y1_grid, const Axis& y2_grid) {
  y1_grid.validate();
  y2_grid.validate();
  Pattern p;
  p.label = "joint";
  p.x = y1_grid;
  p.y = y2_grid;
  p.values.resize(y1_grid.count * y2_grid.count);
  for (std::size_t i = 0; i < y1_grid.count; ++i)
    for (std::size_t j = 0; j < y2_grid.count; ++j) p.values[i * y2_grid.count + j] = jd(y1_grid[i], y2_grid[j]);
  return p;
}

double default_y2_half_width(const Scenario& s) {
  return 4.0 * std::sqrt(closed_form(s).delta2);
}

}  // namespace ghostsim
