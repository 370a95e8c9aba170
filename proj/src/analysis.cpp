#include "ghostsim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSupportFloor = 1e-6;  // of the peak; also bounds the analysis window
constexpr std::size_t kMinPeriods = 4;

// Solves a symmetric 3x3 system by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    if (m[c][c] == 0.0) throw AnalysisError("singular least-squares system");
    for (int r = c + 1; r < 3; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double acc = m[r][3];
    for (int k = r + 1; k < 3; ++k) acc -= m[r][k] * x[k];
    x[r] = acc / m[r][r];
  }
  return x;
}

// Weighted least squares of t against basis functions (f0, f1, f2).
template <class Basis>
std::array<double, 3> least_squares(std::size_t n, Basis basis) {
  std::array<std::array<double, 4>, 3> m{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto [f, t, w] = basis(i);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += w * f[r] * f[c];
      m[r][3] += w * f[r] * t;
    }
  }
  return solve3(m);
}

// exp(a + b u + c u^2) with u = (y - origin) / scale.
struct Envelope {
  double a = 0.0, b = 0.0, c = -1.0;
  double origin = 0.0, scale = 1.0;

  double log_value(double y) const {
    const double u = (y - origin) / scale;
    return a + b * u + c * u * u;
  }
  double operator()(double y) const { return std::exp(log_value(y)); }
  double center() const { return origin - b / (2.0 * c) * scale; }
  double fwhm() const { return 2.0 * scale * std::sqrt(std::log(2.0) / -c); }
};

Envelope fit_log_quadratic(const std::vector<double>& ys, const std::vector<double>& vs, const std::vector<double>& ws,
                           double origin, double scale) {
  Envelope e;
  e.origin = origin;
  e.scale = scale;
  const auto coef = least_squares(ys.size(), [&](std::size_t i) {
    const double u = (ys[i] - origin) / scale;
    return std::tuple{std::array<double, 3>{1.0, u, u * u}, std::log(vs[i]), ws[i]};
  });
  e.a = coef[0];
  e.b = coef[1];
  e.c = coef[2];
  return e;
}

// Interior local maxima of v[lo..hi], with a parabolic vertex through the three
// samples around each. Vertex heights go to *heights when asked for.
std::vector<double> local_maxima(const std::vector<double>& y, const std::vector<double>& v, std::size_t lo,
                                 std::size_t hi, std::vector<double>* heights = nullptr) {
  std::vector<double> out;
  for (std::size_t i = std::max<std::size_t>(lo, 1); i + 1 <= hi && i + 1 < v.size(); ++i) {
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    const double den = v[i - 1] - 2.0 * v[i] + v[i + 1];
    double shift = den < 0.0 ? 0.5 * (v[i - 1] - v[i + 1]) / den : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    out.push_back(y[i] + shift * (y[i + 1] - y[i]));
    if (heights) heights->push_back(v[i] - 0.25 * (v[i - 1] - v[i + 1]) * shift);
  }
  return out;
}

struct Prepared {
  std::vector<double> y;
  std::vector<double> v;
  Envelope envelope;
  std::size_t lo = 0, hi = 0;  // analysis window, inclusive
  std::vector<double> signal;  // v / envelope over the window
};

Prepared prepare(const Pattern& p) {
  if (p.is_2d()) throw AnalysisError("fringe analysis needs a 1D pattern");
  if (p.x.count < 16 || p.values.size() != p.x.count) throw AnalysisError("pattern has too few samples");
  for (double v : p.values)
    if (!std::isfinite(v) || v < 0.0) throw AnalysisError("pattern has negative or non-finite values");

  Prepared r;
  r.y = p.x.values();
  r.v = p.values;
  const double peak = *std::max_element(r.v.begin(), r.v.end());
  if (!(peak > 0.0)) throw AnalysisError("no fringes: pattern is identically zero");

  std::size_t s_lo = r.v.size(), s_hi = 0;
  for (std::size_t i = 0; i < r.v.size(); ++i)
    if (r.v[i] >= kSupportFloor * peak) {
      s_lo = std::min(s_lo, i);
      s_hi = i;
    }
  const double origin = 0.5 * (r.y[s_lo] + r.y[s_hi]);
  const double scale = std::max(0.5 * (r.y[s_hi] - r.y[s_lo]), p.x.step());

  auto fit_points = [&](const std::vector<double>& ys_in, const std::vector<double>& vs_in) {
    std::vector<double> ys, vs, ws;
    for (std::size_t i = 0; i < ys_in.size(); ++i) {
      if (!(vs_in[i] > 0.0)) continue;
      ys.push_back(ys_in[i]);
      vs.push_back(vs_in[i]);
      ws.push_back(vs_in[i] / peak);
    }
    return fit_log_quadratic(ys, vs, ws, origin, scale);
  };

  // Through the crests when there are enough of them; refined by locating the
  // crests of the envelope-divided signal, which are the fringe maxima proper.
  // Vertex heights rather than raw samples keep the fit free of grid-phase ripple.
  bool have = false;
  std::vector<double> heights;
  std::vector<double> crest = local_maxima(r.y, r.v, s_lo, s_hi, &heights);
  if (crest.size() >= 5) {
    Envelope e = fit_points(crest, heights);
    if (e.c < 0.0) {
      have = true;
      r.envelope = e;
      for (int iter = 0; iter < 3; ++iter) {
        std::vector<double> s(r.v.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = r.v[i] / r.envelope(r.y[i]);
        heights.clear();
        crest = local_maxima(r.y, s, s_lo, s_hi, &heights);
        if (crest.size() < 5) break;
        for (std::size_t i = 0; i < crest.size(); ++i) heights[i] *= r.envelope(crest[i]);
        e = fit_points(crest, heights);
        if (!(e.c < 0.0)) break;
        r.envelope = e;
      }
    }
  }
  if (!have) {
    const std::vector<double> ys(r.y.begin() + static_cast<long>(s_lo), r.y.begin() + static_cast<long>(s_hi) + 1);
    const std::vector<double> vs(r.v.begin() + static_cast<long>(s_lo), r.v.begin() + static_cast<long>(s_hi) + 1);
    r.envelope = fit_points(ys, vs);
    if (!(r.envelope.c < 0.0)) throw AnalysisError("no fringes: pattern has no localized envelope");
  }

  // Window where the envelope stays above the support floor.
  const double emax_log = r.envelope.log_value(std::clamp(r.envelope.center(), r.y.front(), r.y.back()));
  const double floor_log = emax_log + std::log(kSupportFloor);
  r.lo = r.v.size();
  r.hi = 0;
  for (std::size_t i = 0; i < r.v.size(); ++i)
    if (r.envelope.log_value(r.y[i]) >= floor_log) {
      r.lo = std::min(r.lo, i);
      r.hi = i;
    }
  if (r.lo >= r.hi || r.hi - r.lo < 8) throw AnalysisError("no fringes: analysis window is too narrow");
  r.signal.resize(r.hi - r.lo + 1);
  for (std::size_t i = r.lo; i <= r.hi; ++i) r.signal[i - r.lo] = r.v[i] / r.envelope(r.y[i]);
  return r;
}

struct CosineFit {
  double visibility;
  double phase;  // signal ~ c0 (1 + V cos(k y + phase))
};

// Least squares of c0 + c1 cos(k (y - c)) + c2 sin(k (y - c)) over the three
// fringes centred on the envelope peak.
CosineFit fit_cosine(const Prepared& r, double k) {
  const double period = kTwoPi / k;
  const double c = std::clamp(r.envelope.center(), r.y[r.lo], r.y[r.hi]);
  std::vector<std::size_t> idx;
  for (std::size_t i = r.lo; i <= r.hi; ++i)
    if (std::abs(r.y[i] - c) <= 1.5 * period) idx.push_back(i);
  if (idx.size() < 5) throw AnalysisError("fringes are undersampled: fewer than 5 samples across three fringes");
  const auto coef = least_squares(idx.size(), [&](std::size_t n) {
    const std::size_t i = idx[n];
    const double ph = k * (r.y[i] - c);
    return std::tuple{std::array<double, 3>{1.0, std::cos(ph), std::sin(ph)}, r.signal[i - r.lo], 1.0};
  });
  if (!(coef[0] > 0.0)) throw AnalysisError("no fringes: non-positive mean level");
  CosineFit f;
  f.visibility = std::min(1.0, std::hypot(coef[1], coef[2]) / coef[0]);
  // c1 cos x + c2 sin x = A cos(x + phi) with phi = atan2(-c2, c1).
  f.phase = std::remainder(std::atan2(-coef[2], coef[1]) - k * c, kTwoPi);
  return f;
}

// Hann-weighted DFT amplitude of the mean-removed signal at wavenumber k.
double dft_amplitude(const Prepared& r, const std::vector<double>& weighted, double k) {
  double re = 0.0, im = 0.0;
  for (std::size_t n = 0; n < weighted.size(); ++n) {
    const double ph = k * (r.y[r.lo + n] - r.y[r.lo]);
    re += weighted[n] * std::cos(ph);
    im -= weighted[n] * std::sin(ph);
  }
  return std::hypot(re, im);
}

double spectral_peak(const Prepared& r) {
  const std::size_t n = r.signal.size();
  const double dy = r.y[r.lo + 1] - r.y[r.lo];
  const double span = r.y[r.hi] - r.y[r.lo];

  std::vector<double> hann(n);
  double wsum = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    hann[i] = s * s;
    wsum += hann[i];
    mean += hann[i] * r.signal[i];
  }
  mean /= wsum;
  std::vector<double> weighted(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weighted[i] = hann[i] * (r.signal[i] - mean);
    var += hann[i] * (r.signal[i] - mean) * (r.signal[i] - mean);
  }
  if (!(std::sqrt(var / wsum) > 1e-9 * std::abs(mean)))
    throw AnalysisError("no fringes: envelope-divided signal is flat");

  std::size_t nfft = 1;
  while (nfft < 8 * n) nfft <<= 1;
  const auto mag = detail::real_spectrum_magnitude(weighted, nfft);
  const double dk = kTwoPi / (static_cast<double>(nfft) * dy);
  // Below two periods per window the Hann main lobe merges with the DC lobe.
  const auto first = static_cast<std::size_t>(std::ceil(2.0 * kTwoPi / span / dk));
  if (first + 1 >= mag.size()) throw AnalysisError("too few fringes: window shorter than two periods");
  std::size_t best = first;
  for (std::size_t b = first; b < mag.size(); ++b)
    if (mag[b] > mag[best]) best = b;

  // Golden-section refinement of the continuous amplitude within one bin.
  double a = (static_cast<double>(best) - 1.0) * dk, c = (static_cast<double>(best) + 1.0) * dk;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = c - g * (c - a), x2 = a + g * (c - a);
  double f1 = dft_amplitude(r, weighted, x1), f2 = dft_amplitude(r, weighted, x2);
  for (int it = 0; it < 80 && (c - a) > 1e-13 * c; ++it) {
    if (f1 > f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - g * (c - a);
      f1 = dft_amplitude(r, weighted, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (c - a);
      f2 = dft_amplitude(r, weighted, x2);
    }
  }
  const double k_peak = 0.5 * (a + c);

  // The Hann peak is biased by the mirror-frequency lobe at the 1e-5 level. Polish
  // it by minimizing the cosine-model residual, weighted by the envelope so that
  // the divided-out tails count little. Heavier or lighter weighting lets the
  // uncancelled background of partially coherent patterns pull the estimate.
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) weight[i] = r.envelope(r.y[r.lo + i]);
  auto residual = [&](double k) {
    const auto coef = least_squares(n, [&](std::size_t i) {
      const double ph = k * (r.y[r.lo + i] - r.y[r.lo]);
      return std::tuple{std::array<double, 3>{1.0, std::cos(ph), std::sin(ph)}, r.signal[i], weight[i]};
    });
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = k * (r.y[r.lo + i] - r.y[r.lo]);
      const double d = r.signal[i] - coef[0] - coef[1] * std::cos(ph) - coef[2] * std::sin(ph);
      acc += weight[i] * d * d;
    }
    return acc;
  };
  a = k_peak - dk;
  c = k_peak + dk;
  x1 = c - g * (c - a);
  x2 = a + g * (c - a);
  f1 = -residual(x1);
  f2 = -residual(x2);
  for (int it = 0; it < 80 && (c - a) > 1e-13 * c; ++it) {
    if (f1 > f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - g * (c - a);
      f1 = -residual(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (c - a);
      f2 = -residual(x2);
    }
  }
  return 0.5 * (a + c);
}

// Cubic Lagrange interpolation on a uniform axis.
double interpolate(const Pattern& p, double x) {
  const std::size_t n = p.x.count;
  const double t = (x - p.x.start) / p.x.step();
  const double nearest = std::round(t);
  if (std::abs(t - nearest) < 1e-9 && nearest >= 0.0 && nearest < static_cast<double>(n))
    return p.values[static_cast<std::size_t>(nearest)];
  auto i0 = static_cast<long>(std::floor(t)) - 1;
  i0 = std::clamp(i0, 0L, static_cast<long>(n) - 4);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    double l = 1.0;
    for (int m = 0; m < 4; ++m)
      if (m != j) l *= (t - static_cast<double>(i0 + m)) / static_cast<double>(j - m);
    acc += l * p.values[static_cast<std::size_t>(i0 + j)];
  }
  return acc;
}

bool axes_match(const Axis& a, const Axis& b) {
  const double tol = 1e-12 * std::max(std::abs(a.start) + std::abs(a.stop), 1e-300);
  return a.count == b.count && std::abs(a.start - b.start) <= tol && std::abs(a.stop - b.stop) <= tol;
}

}  // namespace

std::string to_string(FringeMethod m) {
  switch (m) {
    case FringeMethod::spectral_peak:
      return "spectral-peak";
    case FringeMethod::peak_spacing:
      return "peak-spacing";
  }
  return "unknown";
}

FringeReport extract_fringes(const Pattern& p) {
  const Prepared r = prepare(p);
  const double k = spectral_peak(r);
  const double spacing = kTwoPi / k;
  const double span = r.y[r.hi] - r.y[r.lo];
  const double periods = span / spacing;
  if (periods < static_cast<double>(kMinPeriods))
    throw AnalysisError("too few fringes: " + std::to_string(periods) + " periods in the analysis window, need " +
                        std::to_string(kMinPeriods));

  FringeReport rep{};
  rep.method = FringeMethod::spectral_peak;
  rep.spacing = spacing;
  rep.spacing_spectral = spacing;
  rep.n_fringes_used = static_cast<std::size_t>(std::floor(periods));
  rep.uncertainty = p.x.step() / std::sqrt(static_cast<double>(rep.n_fringes_used));
  rep.envelope_width = r.envelope.fwhm();
  rep.envelope_center = r.envelope.center();

  // Signal crests, ignoring the outermost partial fringe on each side.
  std::vector<double> crest_y(r.y.begin() + static_cast<long>(r.lo), r.y.begin() + static_cast<long>(r.hi) + 1);
  const auto peaks = local_maxima(crest_y, r.signal, 0, r.signal.size() - 1);
  std::vector<double> kept;
  for (double y : peaks)
    if (y - crest_y.front() > 0.5 * spacing && crest_y.back() - y > 0.5 * spacing) kept.push_back(y);
  rep.spacing_peaks = kept.size() >= 2
                          ? (kept.back() - kept.front()) / static_cast<double>(kept.size() - 1)
                          : std::numeric_limits<double>::quiet_NaN();
  rep.methods_disagree = !(std::abs(rep.spacing_peaks - spacing) <= 0.02 * spacing);

  const CosineFit cf = fit_cosine(r, k);
  rep.visibility = cf.visibility;
  rep.phase = cf.phase;
  return rep;
}

double visibility_at(const Pattern& p, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw AnalysisError("visibility_at: spacing must be positive");
  const Prepared r = prepare(p);
  return fit_cosine(r, kTwoPi / spacing).visibility;
}

PatternComparison compare_patterns(const Pattern& a, const Pattern& b) {
  if (a.is_2d() != b.is_2d()) throw AnalysisError("cannot compare a 1D pattern with a 2D pattern");
  // The larger peak keeps the measure symmetric in its arguments.
  const double peak = std::max(a.peak(), b.peak());
  if (!(peak > 0.0)) throw AnalysisError("patterns are identically zero");

  double max_dev = 0.0, sq = 0.0;
  std::size_t count = 0;
  if (a.is_2d()) {
    if (!axes_match(a.x, b.x) || !axes_match(*a.y, *b.y)) throw AnalysisError("2D patterns must share their axes");
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      const double d = std::abs(a.values[i] - b.values[i]);
      max_dev = std::max(max_dev, d);
      sq += d * d;
    }
    count = a.values.size();
  } else {
    if (b.x.count < 4) throw AnalysisError("pattern has too few samples to interpolate");
    const double lo = std::min(b.x.start, b.x.stop), hi = std::max(b.x.start, b.x.stop);
    const double slack = 1e-9 * std::abs(b.x.step());
    for (std::size_t i = 0; i < a.x.count; ++i) {
      const double x = a.x[i];
      if (x < lo - slack || x > hi + slack) continue;
      const double d = std::abs(a.values[i] - interpolate(b, x));
      max_dev = std::max(max_dev, d);
      sq += d * d;
      ++count;
    }
    if (count == 0) throw AnalysisError("patterns have disjoint axis ranges");
  }

  PatternComparison out{};
  out.max_abs_dev = max_dev / peak;
  out.rms_dev = std::sqrt(sq / static_cast<double>(count)) / peak;
  out.spacing_ratio = std::numeric_limits<double>::quiet_NaN();
  if (!a.is_2d()) {
    try {
      out.spacing_ratio = extract_fringes(a).spacing / extract_fringes(b).spacing;
    } catch (const AnalysisError&) {
    }
  }
  return out;
}

BucketTable visibility_vs_bucket(const JointDensity& jd, const std::vector<double>& widths, const Axis& y2_grid,
                                 double y1_center) {
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!(widths[i] >= 0.0) || !std::isfinite(widths[i])) throw AnalysisError("bucket widths must be non-negative");
    if (i > 0 && widths[i] < widths[i - 1]) throw AnalysisError("bucket widths must be ascending");
  }
  // The fringe period does not depend on the bucket; take it from the point detector.
  double spacing;
  try {
    spacing = extract_fringes(bucket_average(jd, y1_center, 0.0, y2_grid)).spacing;
  } catch (const AnalysisError&) {
    spacing = kTwoPi / std::abs(jd.theta2);
  }

  BucketTable t{};
  t.monotone = true;
  for (double w : widths) {
    const double v = visibility_at(bucket_average(jd, y1_center, w, y2_grid), spacing);
    if (!t.rows.empty() && v > t.rows.back().visibility + 1e-9) t.monotone = false;
    t.rows.push_back({w, v});
  }
  return t;
}

}  // namespace ghostsim
