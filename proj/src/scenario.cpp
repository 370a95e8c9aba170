#include "ghostsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double Scenario::gamma() const { return std::sqrt(gamma2()); }

std::vector<std::string> Scenario::issues(const std::string& prefix) const {
  std::vector<std::string> out;
  auto need_positive = [&](double v, const char* field) {
    if (!positive(v)) out.push_back(prefix + "." + field + ": must be a positive finite length");
  };
  need_positive(lambda1, "lambda1");
  need_positive(lambda2, "lambda2");
  need_positive(L1, "L1");
  need_positive(L2, "L2");
  if (!std::isfinite(slit_separation) || slit_separation < 0.0)
    out.push_back(prefix + ".d: must be a non-negative finite length");
  need_positive(slit_width, "epsilon");
  need_positive(source.ell_sigma, "source.ell_sigma");
  need_positive(source.omega, "source.omega");
  if (lens) {
    const double f = lens->focal_length;
    if (!positive(f))
      out.push_back(prefix + ".lens.f: must be a positive finite length");
    else if (positive(L1) && f > L1)
      out.push_back(prefix + ".lens.f: lens would sit behind the slit plane (f > L1)");
  }
  return out;
}

void Scenario::validate() const {
  auto found = issues();
  if (!found.empty()) throw ConfigError(std::move(found));
}

double default_omega(double slit_separation, double gamma) { return 10.0 * std::max(slit_separation, gamma); }

double ell_sigma_from_gamma(double gamma, double slit_width) {
  if (!(gamma > slit_width)) throw ConfigError({"scenario.source.gamma: γ ≤ ε: ℓσ undefined"});
  return std::sqrt(gamma * gamma - slit_width * slit_width);
}

RegimeFlags regime_flags(const Scenario& s) {
  constexpr double pi = std::numbers::pi;
  RegimeFlags r{};
  r.omega_over_slit_width = s.source.omega / s.slit_width;
  r.omega_over_ell_sigma = s.source.omega / s.source.ell_sigma;
  r.good_correlation = r.omega_over_slit_width >= 10.0 && r.omega_over_ell_sigma >= 10.0;
  r.spreading_ratio = (s.lambda1 + s.lambda2) / pi * s.L2 / (2.0 * s.source.omega * s.gamma());
  r.closed_form_accurate = r.good_correlation && r.spreading_ratio <= 1e-4;
  const double shortest = std::min({s.lambda2 * s.L2, s.lambda2 * s.L1, s.lambda1 * s.L2});
  r.simplified_ratio = pi * s.gamma2() / shortest;
  r.simplified_valid = r.simplified_ratio <= 0.2;
  r.slit_overlap = std::exp(-2.0 * s.y0() * s.y0() / (s.slit_width * s.slit_width));
  r.separated_slits = r.slit_overlap < 1e-4;
  return r;
}

Scenario ding_fig3() {
  Scenario s{};
  s.lambda1 = 1530e-9;
  s.lambda2 = 780e-9;
  s.L1 = 1.15;
  s.L2 = 0.325;
  s.slit_separation = 0.5e-3;
  s.slit_width = 0.1e-3;
  const double gamma = 0.11e-3;
  s.source.ell_sigma = ell_sigma_from_gamma(gamma, s.slit_width);
  s.source.omega = default_omega(s.slit_separation, gamma);
  return s;
}

}  // namespace ghostsim
