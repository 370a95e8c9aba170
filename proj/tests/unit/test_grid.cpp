#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ghostsim/engine.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/grid.hpp"

using namespace ghostsim;

namespace {

// Short legs and a narrow source so that a 512 x 512 grid suffices.
Scenario small_scenario() {
  Scenario s{};
  s.lambda1 = 1.0e-6;
  s.lambda2 = 0.8e-6;
  s.L1 = 0.05;
  s.L2 = 0.02;
  s.slit_separation = 0.3e-3;
  s.slit_width = 0.08e-3;
  s.source.ell_sigma = 0.05e-3;
  s.source.omega = 1.0e-3;
  return s;
}

double max_dev(const GridState& a, const GridState& b) {
  double dev = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    dev = std::max(dev, std::abs(a.values[k] - b.values[k]));
    peak = std::max(peak, std::abs(b.values[k]));
  }
  return dev / peak;
}

GridSpec small_spec() { return preflight(small_scenario(), 512, 512); }

}  // namespace

TEST(GridSpec, ValidatesSizesAndExtents) {
  EXPECT_THROW((GridSpec{100, 128, 1e-3, 1e-3}.validate()), ResourceError);
  EXPECT_THROW((GridSpec{4, 4, 1e-3, 1e-3}.validate()), ResourceError);
  EXPECT_THROW((GridSpec{64, 64, 0.0, 1e-3}.validate()), ResourceError);
  EXPECT_NO_THROW((GridSpec{64, 128, 1e-3, 2e-3}.validate()));
  const GridSpec g{64, 128, 1e-3, 2e-3};
  EXPECT_DOUBLE_EQ(g.y1(32), 0.0);
  EXPECT_DOUBLE_EQ(g.y2(64), 0.0);
  EXPECT_EQ(g.memory_bytes(), 3u * 16u * 64u * 128u);
}

TEST(Preflight, RefusesOverMemoryCapWithAlternative) {
  try {
    preflight(ding_fig3(), 4096, 4096, std::size_t{256} << 20);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    const std::string msg = e.what();
    // 3 buffers x 16 bytes x 2048^2 = 192 MiB is the largest power of two under 256 MiB.
    EXPECT_NE(msg.find("largest square grid within the cap is 2048x2048"), std::string::npos) << msg;
  }
}

TEST(Preflight, RefusesUnderResolvedGrid) {
  try {
    preflight(ding_fig3(), 256, 256);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("need n1 >= 2048"), std::string::npos) << e.what();
  }
}

TEST(Discretize, ReportsTruncation) {
  const Scenario s = small_scenario();
  GridSpec spec = small_spec();
  spec.extent1 /= 4.0;
  try {
    discretize(build_source_state(s), spec);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("requires extents"), std::string::npos);
  }
}

TEST(Propagate, ZeroDistanceIsIdentity) {
  const Scenario s = small_scenario();
  const GridState a = discretize(build_source_state(s), small_spec());
  const GridState b = propagate(a, {s.lambda1, 0.0}, {s.lambda2, 0.0});
  EXPECT_LT(max_dev(b, a), 1e-14);
}

TEST(Propagate, SemigroupAndUnitarity) {
  const Scenario s = small_scenario();
  const GridState a = discretize(build_source_state(s), small_spec());
  const GridState two = propagate(propagate(a, {s.lambda1, 0.01}, {s.lambda2, 0.01}), {s.lambda1, 0.03},
                                  {s.lambda2, 0.03});
  const GridState one = propagate(a, {s.lambda1, 0.04}, {s.lambda2, 0.04});
  EXPECT_LT(max_dev(two, one), 1e-12);
  EXPECT_NEAR(one.norm() / a.norm(), 1.0, 1e-12);
}

TEST(Propagate, MatchesAnalyticEvolution) {
  const Scenario s = small_scenario();
  const BiGaussianState src = build_source_state(s);
  // Preflight sizes extents for densities; amplitudes at its edge are ~1e-5 of peak and wrap
  // around under the periodic transform. Doubling the extent at the same step removes that.
  const GridSpec base = small_spec();
  const GridSpec spec{2 * base.n1, 2 * base.n2, 2.0 * base.extent1, 2.0 * base.extent2};
  const GridState numeric = propagate(discretize(src, spec), {s.lambda1, s.L2}, {s.lambda2, s.L2});
  const GridState analytic = discretize(evolve(src, {s.lambda1, s.L2}, {s.lambda2, s.L2}), spec);
  EXPECT_LT(max_dev(numeric, analytic), 1e-9);
}

TEST(Propagate, DetectsSpectralEdge) {
  // A source much narrower than the grid step puts power at the spectral edge.
  Scenario s = small_scenario();
  s.source.ell_sigma = 2e-6;
  s.source.omega = 0.5e-3;
  const GridSpec spec{64, 64, 2e-3, 2e-3};
  const BiGaussianState src = build_source_state(s);
  GridState gs{spec, std::vector<complex>(64 * 64), {}};
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) gs.values[i * 64 + j] = src(spec.y1(i), spec.y2(j));
  EXPECT_THROW(propagate(gs, {s.lambda1, 0.01}, {s.lambda2, 0.01}), ResourceError);
}

TEST(SlitProject, MatchesEngine) {
  const Scenario s = small_scenario();
  const GridSpec spec = small_spec();
  const BiGaussianState arriving = evolve(build_source_state(s), {s.lambda1, s.L2}, {s.lambda2, s.L2});
  const SlitResult exact = apply_double_slit(arriving, s);
  const auto [phi_a, phi_b] = slit_modes(s);
  const SlitProjection sp = slit_project(discretize(arriving, spec), phi_a, phi_b);
  EXPECT_NEAR(sp.passed / exact.pass_probability, 1.0, 1e-9);
  EXPECT_NEAR(sp.state.norm(), 1.0, 1e-12);
  const PacketFit fit = fit_packet(sp.psi_a, spec.axis2());
  EXPECT_NEAR(fit.complex_center().real() / exact.y0_prime, 1.0, 1e-8);
  EXPECT_NEAR(std::abs(fit.width.value() - exact.gamma.value()) / std::abs(exact.gamma.value()), 0.0, 1e-8);
}

TEST(SlitProject, StateMissingTheSlitsThrows) {
  Scenario s = small_scenario();
  const GridSpec spec = small_spec();
  const GridState gs = discretize(build_source_state(s), spec);
  const GaussianTerm far_a = normalized_packet(spec.extent1 * 50.0, s.slit_width);
  const GaussianTerm far_b = normalized_packet(-spec.extent1 * 50.0, s.slit_width);
  EXPECT_THROW(slit_project(gs, far_a, far_b), PhysicsError);
}

TEST(FitPacket, RecoversKnownGaussian) {
  const Axis ax = Axis::symmetric(2e-3, 1024);
  const GaussianTerm t{complex{0.3, 0.2}, 0.17e-3, ComplexWidth{4e-8, 9e-8}, 3000.0};
  std::vector<complex> samples(ax.count);
  for (std::size_t j = 0; j < ax.count; ++j) samples[j] = t(ax[j]);
  const PacketFit fit = fit_packet(samples, ax);
  EXPECT_NEAR(std::abs(fit.width.value() - t.width.value()) / std::abs(t.width.value()), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(fit.complex_center() - t.complex_center()), 0.0, 1e-12);
}

TEST(Lens, QuadraticPhaseInfiniteFocalLengthIsIdentity) {
  const Scenario s = small_scenario();
  const GridState a = discretize(build_source_state(s), small_spec());
  const GridState b =
      lens_apply_quadratic(a, Coordinate::second, s.lambda2, std::numeric_limits<double>::infinity());
  EXPECT_EQ(a.values, b.values);
  const GridState c = lens_apply_quadratic(a, Coordinate::second, s.lambda2, 0.5);
  EXPECT_NEAR(c.norm() / a.norm(), 1.0, 1e-14);
}

TEST(Lens, RejectsDecompositionThatDoesNotMatchTheGrid) {
  const Scenario s = small_scenario();
  const GridSpec spec = small_spec();
  const BiGaussianState src = build_source_state(s);
  const GridState gs = discretize(src, spec);
  const BiGaussianState wrong = evolve(src, {s.lambda1, 0.01}, {s.lambda2, 0.01});
  EXPECT_THROW(lens_apply(gs, wrong, Coordinate::second, s.lambda2, 0.02), PhysicsError);
}

TEST(Oracle, SmallScenarioMatchesAnalytic) {
  const Scenario s = small_scenario();
  const GridSpec spec = small_spec();
  const OracleRun run = run_oracle(s, spec);
  const JointDensity jd = joint_density(s);
  double peak = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < spec.n1; ++i)
    for (std::size_t j = 0; j < spec.n2; ++j) {
      const double a = jd(spec.y1(i), spec.y2(j));
      peak = std::max(peak, a);
      dev = std::max(dev, std::abs(a - run.joint.at(i, j)));
    }
  EXPECT_LT(dev / peak, 1e-6);
  EXPECT_LT(run.norm_drift, 1e-10);
  EXPECT_NEAR(run.passed / jd.slit.pass_probability, 1.0, 1e-9);
  ASSERT_GE(run.norm_history.size(), 4u);
  EXPECT_EQ(run.norm_history.front().stage, "source");
}

TEST(Oracle, SmallScenarioWithLensMatchesAnalytic) {
  Scenario s = small_scenario();
  s.lens = Lens{0.02};
  // The focused leg needs a finer y2 step than the lens-free setup.
  const GridSpec spec = preflight(s, 512, 4096);
  const OracleRun run = run_oracle(s, spec);
  const JointDensity jd = joint_density(s);
  double peak = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < spec.n1; ++i)
    for (std::size_t j = 0; j < spec.n2; ++j) {
      const double a = jd(spec.y1(i), spec.y2(j));
      peak = std::max(peak, a);
      dev = std::max(dev, std::abs(a - run.joint.at(i, j)));
    }
  EXPECT_LT(dev / peak, 1e-5);
  bool lens_recorded = false;
  for (const auto& r : run.norm_history) lens_recorded = lens_recorded || r.stage == "lens";
  EXPECT_TRUE(lens_recorded);
}
