#include "ghostsim/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fft.hpp"
#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr complex I{0.0, 1.0};
constexpr double kSigmas = 6.5;
constexpr double kBandLimit = 1e-8;

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

struct Sym2 {
  double xx, xy, yy;
  Sym2 inverse() const {
    const double det = xx * yy - xy * xy;
    return {yy / det, -xy / det, xx / det};
  }
};

// Position and spectral footprint of one two-coordinate Gaussian term.
struct Footprint {
  std::array<double, 2> mean, std, k_mean, k_std;
};

Footprint footprint(const GaussianForm2& t) {
  Footprint fp{};
  // |T|^2 = exp(-y^T (2 Re A) y + 2 Re(b)^T y): covariance (4 Re A)^-1, mean (2 Re A)^-1 Re b.
  const Sym2 re_a{t.a11.real(), t.a12.real(), t.a22.real()};
  const Sym2 inv = re_a.inverse();
  fp.mean = {0.5 * (inv.xx * t.b1.real() + inv.xy * t.b2.real()), 0.5 * (inv.xy * t.b1.real() + inv.yy * t.b2.real())};
  fp.std = {std::sqrt(inv.xx / 4.0), std::sqrt(inv.yy / 4.0)};

  // Spectrum ~ exp((b - ik)^T M (b - ik) / 4), M = A^-1: covariance (Re M)^-1, mean (Re M)^-1 Im(M b).
  const complex det = t.a11 * t.a22 - t.a12 * t.a12;
  const complex m11 = t.a22 / det, m12 = -t.a12 / det, m22 = t.a11 / det;
  const Sym2 re_m{m11.real(), m12.real(), m22.real()};
  const Sym2 kc = re_m.inverse();
  const double v1 = (m11 * t.b1 + m12 * t.b2).imag();
  const double v2 = (m12 * t.b1 + m22 * t.b2).imag();
  fp.k_mean = {kc.xx * v1 + kc.xy * v2, kc.xy * v1 + kc.yy * v2};
  fp.k_std = {std::sqrt(kc.xx), std::sqrt(kc.yy)};
  return fp;
}

void require(GridRequirement& r, const BiGaussianState& st) {
  for (const auto& t : st.terms()) {
    const Footprint fp = footprint(t);
    r.extent1 = std::max(r.extent1, std::abs(fp.mean[0]) + kSigmas * fp.std[0]);
    r.extent2 = std::max(r.extent2, std::abs(fp.mean[1]) + kSigmas * fp.std[1]);
    r.max_step1 = std::min(r.max_step1, pi / (std::abs(fp.k_mean[0]) + kSigmas * fp.k_std[0]));
    r.max_step2 = std::min(r.max_step2, pi / (std::abs(fp.k_mean[1]) + kSigmas * fp.k_std[1]));
  }
}

std::vector<double> wavenumbers(std::size_t n, double dy) {
  std::vector<double> k(n);
  const double dk = 2.0 * pi / (static_cast<double>(n) * dy);
  for (std::size_t i = 0; i < n; ++i)
    k[i] = dk * (i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n));
  return k;
}

double sum_norm(const std::vector<complex>& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc;
}

// Fraction of sum |v|^2 on samples where either coordinate is in the outer band.
template <class Outer1, class Outer2>
double band_fraction(const std::vector<complex>& v, std::size_t n1, std::size_t n2, Outer1 outer1, Outer2 outer2) {
  double band = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    const bool o1 = outer1(i);
    for (std::size_t j = 0; j < n2; ++j) {
      const double p = std::norm(v[i * n2 + j]);
      total += p;
      if (o1 || outer2(j)) band += p;
    }
  }
  return total > 0.0 ? band / total : 0.0;
}

}  // namespace

void GridSpec::validate() const {
  if (!power_of_two(n1) || !power_of_two(n2))
    throw ResourceError("grid sizes must be powers of two no smaller than 8");
  if (!(extent1 > 0.0) || !(extent2 > 0.0) || !std::isfinite(extent1) || !std::isfinite(extent2))
    throw ResourceError("grid extents must be positive and finite");
}

double GridState::norm() const { return sum_norm(values) * spec.dy1() * spec.dy2(); }

GridRequirement grid_requirement(const Scenario& s) {
  const double inf = std::numeric_limits<double>::infinity();
  GridRequirement r{0.0, 0.0, inf, inf};
  const BiGaussianState source = build_source_state(s);
  require(r, source);
  const BiGaussianState arriving = evolve(source, {s.lambda1, s.L2}, {s.lambda2, s.L2});
  require(r, arriving);
  const SlitResult slit = apply_double_slit(arriving, s);
  require(r, slit.post_slit);
  if (s.lens) {
    const double f = s.lens->focal_length;
    const BiGaussianState before = evolve(slit.post_slit, {s.lambda1, s.L1 - f}, {s.lambda2, s.L1 - f});
    require(r, before);
    const BiGaussianState after = lens_transform(before, Coordinate::second, s.lambda2, f);
    require(r, after);
    require(r, evolve(after, {s.lambda1, f}, {s.lambda2, f}));
  } else {
    require(r, evolve(slit.post_slit, {s.lambda1, s.L1}, {s.lambda2, s.L1}));
  }
  return r;
}

GridSpec preflight(const Scenario& s, std::size_t n1, std::size_t n2, std::size_t memory_cap) {
  const GridRequirement r = grid_requirement(s);
  GridSpec spec{n1, n2, r.extent1, r.extent2};
  spec.validate();
  if (spec.memory_bytes() > memory_cap) {
    std::size_t n = std::min(n1, n2);
    while (n > 8 && 3 * 16 * n * n > memory_cap) n /= 2;
    throw ResourceError("grid " + std::to_string(n1) + "x" + std::to_string(n2) + " needs " +
                        std::to_string(spec.memory_bytes() >> 20) + " MiB, above the " +
                        std::to_string(memory_cap >> 20) + " MiB cap; largest square grid within the cap is " +
                        std::to_string(n) + "x" + std::to_string(n) + " at extents " + fmt("%.4g", r.extent1) +
                        " m / " + fmt("%.4g", r.extent2) + " m");
  }
  auto need = [](double extent, double max_step) {
    std::size_t n = 8;
    while (2.0 * extent / static_cast<double>(n) > max_step) n *= 2;
    return n;
  };
  if (spec.dy1() > r.max_step1 || spec.dy2() > r.max_step2)
    throw ResourceError("grid too coarse for the spectrum: extents " + fmt("%.4g", r.extent1) + " m / " +
                        fmt("%.4g", r.extent2) + " m need n1 >= " + std::to_string(need(r.extent1, r.max_step1)) +
                        " and n2 >= " + std::to_string(need(r.extent2, r.max_step2)));
  return spec;
}

GridState discretize(const BiGaussianState& state, const GridSpec& spec, const std::string& stage) {
  spec.validate();
  GridState gs{spec, std::vector<complex>(spec.n1 * spec.n2), {}};
  for (std::size_t i = 0; i < spec.n1; ++i) {
    const double y1 = spec.y1(i);
    for (std::size_t j = 0; j < spec.n2; ++j) gs.values[i * spec.n2 + j] = state(y1, spec.y2(j));
  }
  const double analytic = state.norm_squared();
  const double sampled = gs.norm();
  if (std::abs(sampled - analytic) > 1e-9 * analytic) {
    GridRequirement r{0.0, 0.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    require(r, state);
    throw ResourceError("grid truncates the state (sampled norm " + fmt("%.12g", sampled) + " vs " +
                        fmt("%.12g", analytic) + "); requires extents >= " + fmt("%.4g", r.extent1) + " m / " +
                        fmt("%.4g", r.extent2) + " m and steps <= " + fmt("%.4g", r.max_step1) + " m / " +
                        fmt("%.4g", r.max_step2) + " m");
  }
  gs.norm_history.push_back({stage, sampled / analytic});
  return gs;
}

GridState propagate(const GridState& gs, const OpticalDistance& od1, const OpticalDistance& od2) {
  od1.validate();
  od2.validate();
  const GridSpec& sp = gs.spec;
  GridState out = gs;
  if (od1.distance == 0.0 && od2.distance == 0.0) {
    out.norm_history.push_back({"propagate", out.norm()});
    return out;
  }
  detail::Fft2 fft(sp.n1, sp.n2);
  fft.forward(out.values.data());

  const auto k1 = wavenumbers(sp.n1, sp.dy1());
  const auto k2 = wavenumbers(sp.n2, sp.dy2());
  const double kmax1 = pi / sp.dy1(), kmax2 = pi / sp.dy2();
  const double spectral_band = band_fraction(
      out.values, sp.n1, sp.n2, [&](std::size_t i) { return std::abs(k1[i]) > 0.9 * kmax1; },
      [&](std::size_t j) { return std::abs(k2[j]) > 0.9 * kmax2; });
  if (spectral_band > kBandLimit)
    throw ResourceError("aliasing risk: " + fmt("%.3e", spectral_band) +
                        " of the spectrum lies in the outer 10% band; increase n or reduce the extent");

  const double s1 = od1.increment(), s2 = od2.increment();
  std::vector<complex> p1(sp.n1), p2(sp.n2);
  for (std::size_t i = 0; i < sp.n1; ++i) p1[i] = std::exp(-I * (s1 * k1[i] * k1[i] / 4.0));
  for (std::size_t j = 0; j < sp.n2; ++j) p2[j] = std::exp(-I * (s2 * k2[j] * k2[j] / 4.0));
  const double scale = 1.0 / static_cast<double>(sp.n1 * sp.n2);
  for (std::size_t i = 0; i < sp.n1; ++i) {
    const complex a = p1[i] * scale;
    complex* row = out.values.data() + i * sp.n2;
    for (std::size_t j = 0; j < sp.n2; ++j) row[j] *= a * p2[j];
  }
  fft.inverse(out.values.data());

  const double edge = band_fraction(
      out.values, sp.n1, sp.n2, [&](std::size_t i) { return std::abs(sp.y1(i)) > 0.95 * sp.extent1; },
      [&](std::size_t j) { return std::abs(sp.y2(j)) > 0.95 * sp.extent2; });
  if (edge > kBandLimit)
    throw ResourceError("aliasing risk: " + fmt("%.3e", edge) +
                        " of the norm reached the outer 5% of the grid; increase the extent");
  out.norm_history.push_back({"propagate", out.norm()});
  return out;
}

SlitProjection slit_project(const GridState& gs, const GaussianTerm& phi_a, const GaussianTerm& phi_b) {
  const GridSpec& sp = gs.spec;
  std::vector<complex> fa(sp.n1), fb(sp.n1);
  for (std::size_t i = 0; i < sp.n1; ++i) {
    fa[i] = phi_a(sp.y1(i));
    fb[i] = phi_b(sp.y1(i));
  }
  SlitProjection r{gs, 0.0, std::vector<complex>(sp.n2), std::vector<complex>(sp.n2)};
  const double h1 = sp.dy1();
  for (std::size_t i = 0; i < sp.n1; ++i) {
    const complex ca = std::conj(fa[i]) * h1, cb = std::conj(fb[i]) * h1;
    const complex* row = gs.values.data() + i * sp.n2;
    for (std::size_t j = 0; j < sp.n2; ++j) {
      r.psi_a[j] += ca * row[j];
      r.psi_b[j] += cb * row[j];
    }
  }
  for (std::size_t i = 0; i < sp.n1; ++i) {
    complex* row = r.state.values.data() + i * sp.n2;
    for (std::size_t j = 0; j < sp.n2; ++j) row[j] = fa[i] * r.psi_a[j] + fb[i] * r.psi_b[j];
  }
  const double incoming = gs.norm();
  const double kept = r.state.norm();
  r.passed = kept / incoming;
  if (!(r.passed >= 1e-12)) throw PhysicsError("state misses the slits");
  r.state.norm_history.push_back({"slit_project", kept});
  const double scale = 1.0 / std::sqrt(kept);
  for (auto& z : r.state.values) z *= scale;
  r.state.norm_history.push_back({"renormalize", r.state.norm()});
  return r;
}

GridState lens_apply(const GridState& gs, const BiGaussianState& decomposition, Coordinate coordinate,
                     double wavelength, double focal_length) {
  if (decomposition.size() == 0) throw PhysicsError("complex-centre lens map needs a Gaussian decomposition of the state");
  const GridSpec& sp = gs.spec;
  double peak = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < sp.n1; ++i)
    for (std::size_t j = 0; j < sp.n2; ++j) {
      const complex g = gs.at(i, j);
      peak = std::max(peak, std::abs(g));
      dev = std::max(dev, std::abs(g - decomposition(sp.y1(i), sp.y2(j))));
    }
  if (dev > 1e-6 * peak)
    throw PhysicsError("Gaussian decomposition does not match the grid state (deviation " + fmt("%.3e", dev / peak) +
                       " of peak)");
  const BiGaussianState mapped = lens_transform(decomposition, coordinate, wavelength, focal_length);
  GridState out = discretize(mapped, sp, "lens");
  out.norm_history = gs.norm_history;
  out.norm_history.push_back({"lens", out.norm()});
  return out;
}

GridState lens_apply_quadratic(const GridState& gs, Coordinate coordinate, double wavelength, double focal_length) {
  if (!(wavelength > 0.0)) throw PhysicsError("wavelength must be positive");
  if (!(focal_length > 0.0)) throw PhysicsError("focal length must be positive");
  GridState out = gs;
  if (std::isinf(focal_length)) {
    out.norm_history.push_back({"lens_quadratic", out.norm()});
    return out;
  }
  const double lam = wavelength / pi;
  const GridSpec& sp = gs.spec;
  for (std::size_t i = 0; i < sp.n1; ++i)
    for (std::size_t j = 0; j < sp.n2; ++j) {
      const double y = coordinate == Coordinate::first ? sp.y1(i) : sp.y2(j);
      out.values[i * sp.n2 + j] *= std::exp(-I * (y * y / (lam * focal_length)));
    }
  out.norm_history.push_back({"lens_quadratic", out.norm()});
  return out;
}

Pattern density(const GridState& gs) {
  Pattern p;
  p.label = "joint";
  p.x = gs.spec.axis1();
  p.y = gs.spec.axis2();
  p.values.resize(gs.values.size());
  for (std::size_t k = 0; k < gs.values.size(); ++k) p.values[k] = std::norm(gs.values[k]);
  return p;
}

PacketFit fit_packet(const std::vector<complex>& samples, const Axis& axis) {
  const std::size_t n = samples.size();
  if (n != axis.count || n < 5) throw AnalysisError("packet fit: sample count does not match the axis");
  std::vector<double> w(n);
  double peak = 0.0;
  std::size_t ipeak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::norm(samples[i]);
    if (w[i] > peak) peak = w[i], ipeak = i;
  }
  if (!(peak > 0.0)) throw AnalysisError("packet fit: zero wavefunction");
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) m0 += w[i], m1 += w[i] * axis[i];
  const double mu = m1 / m0;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += w[i] * (axis[i] - mu) * (axis[i] - mu);
  var /= m0;
  const double re_inv = 1.0 / (4.0 * var);

  // Unwrapped phase walking outward from the peak.
  std::vector<double> phase(n);
  phase[ipeak] = std::arg(samples[ipeak]);
  for (std::size_t i = ipeak + 1; i < n; ++i)
    phase[i] = phase[i - 1] + std::arg(samples[i] * std::conj(samples[i - 1]));
  for (std::size_t i = ipeak; i-- > 0;) phase[i] = phase[i + 1] + std::arg(samples[i] * std::conj(samples[i + 1]));

  // Weighted least squares phase = c0 + c1 u + c2 u^2, u = (y - mu) / sd.
  const double sd = std::sqrt(var);
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] < 1e-12 * peak) continue;
    const double u = (axis[i] - mu) / sd;
    double up = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += w[i] * up;
      if (k < 3) t[k] += w[i] * up * phase[i];
      up *= u;
    }
  }
  const double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det3(a);
  double coef[3];
  for (int c = 0; c < 3; ++c) {
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) m[r][k] = (k == c) ? t[r] : a[r][k];
    coef[c] = det3(m) / d;
  }
  const double c1 = coef[1] / sd, c2 = coef[2] / (sd * sd);
  // phase = -Im(1/w) (y - mu)^2 + kappa (y - mu) + const.
  const complex inv{re_inv, -c2};
  return {mu, ComplexWidth{1.0 / inv}, c1};
}

OracleRun run_oracle(const Scenario& s, const GridSpec& spec) {
  s.validate();
  spec.validate();
  const auto [phi_a, phi_b] = slit_modes(s);

  GridState st = discretize(build_source_state(s), spec, "source");
  st = propagate(st, {s.lambda1, s.L2}, {s.lambda2, s.L2});
  SlitProjection sp = slit_project(st, phi_a, phi_b);

  OracleRun run;
  run.spec = spec;
  run.passed = sp.passed;
  run.fit_a = fit_packet(sp.psi_a, spec.axis2());
  run.fit_b = fit_packet(sp.psi_b, spec.axis2());
  {
    complex ab = 0.0;
    double aa = 0.0, bb = 0.0;
    for (std::size_t j = 0; j < spec.n2; ++j) {
      ab += std::conj(sp.psi_a[j]) * sp.psi_b[j];
      aa += std::norm(sp.psi_a[j]);
      bb += std::norm(sp.psi_b[j]);
    }
    run.packet_overlap = std::abs(ab) / std::sqrt(aa * bb);
  }

  st = std::move(sp.state);
  if (s.lens) {
    const double f = s.lens->focal_length;
    st = propagate(st, {s.lambda1, s.L1 - f}, {s.lambda2, s.L1 - f});
    const BiGaussianState arriving = evolve(build_source_state(s), {s.lambda1, s.L2}, {s.lambda2, s.L2});
    const BiGaussianState before =
        evolve(apply_double_slit(arriving, s).post_slit, {s.lambda1, s.L1 - f}, {s.lambda2, s.L1 - f});
    st = lens_apply(st, before, Coordinate::second, s.lambda2, f);
    st = propagate(st, {s.lambda1, f}, {s.lambda2, f});
  } else {
    st = propagate(st, {s.lambda1, s.L1}, {s.lambda2, s.L1});
  }

  run.joint = density(st);
  run.joint.label = "joint_oracle";
  run.norm_history = st.norm_history;
  run.norm_drift = 0.0;
  for (const auto& r : run.norm_history)
    if (r.stage != "slit_project") run.norm_drift = std::max(run.norm_drift, std::abs(r.norm - 1.0));
  return run;
}

}  // namespace ghostsim
