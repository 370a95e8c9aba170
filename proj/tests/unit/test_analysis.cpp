#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "ghostsim/analysis.hpp"
#include "ghostsim/engine.hpp"
#include "ghostsim/errors.hpp"

using namespace ghostsim;

namespace {

constexpr double kPi = std::numbers::pi;

// envelope * (1 + V cos(k y + phase)) with a Gaussian envelope of 1/e^2 half-width w.
Pattern synthetic(const Axis& ax, double k, double w, double vis = 1.0, double phase = 0.0, double center = 0.0) {
  Pattern p;
  p.x = ax;
  p.values.resize(ax.count);
  for (std::size_t i = 0; i < ax.count; ++i) {
    const double y = ax[i];
    p.values[i] = std::exp(-2.0 * (y - center) * (y - center) / (w * w)) * (1.0 + vis * std::cos(k * y + phase));
  }
  return p;
}

Axis reference_axis(const Scenario& s) { return Axis::symmetric(default_y2_half_width(s), 4001); }

}  // namespace

TEST(ExtractFringes, SyntheticReferenceFrequency) {
  const Axis ax = Axis::symmetric(20e-3, 4001);
  const Pattern p = synthetic(ax, 1906.5, 6e-3);
  const FringeReport r = extract_fringes(p);
  EXPECT_NEAR(r.spacing, 2.0 * kPi / 1906.5, ax.step());
  EXPECT_NEAR(r.spacing, 3.2955e-3, ax.step());
  EXPECT_EQ(r.method, FringeMethod::spectral_peak);
  EXPECT_FALSE(r.methods_disagree);
  EXPECT_NEAR(r.visibility, 1.0, 1e-6);
  EXPECT_GE(r.uncertainty, ax.step() / std::sqrt(static_cast<double>(r.n_fringes_used)) * (1 - 1e-12));
  // FWHM of exp(-2 y^2 / w^2).
  EXPECT_NEAR(r.envelope_width, 6e-3 * std::sqrt(2.0 * std::log(2.0)), 1e-6);
}

TEST(ExtractFringes, ConstantSignalHasNoFringes) {
  Pattern p;
  p.x = Axis::symmetric(1e-2, 1001);
  p.values.assign(1001, 2.5);
  try {
    extract_fringes(p);
    FAIL() << "expected AnalysisError";
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("no fringes"), std::string::npos) << e.what();
  }
}

TEST(ExtractFringes, FlatEnvelopedSignalHasNoFringes) {
  const Axis ax = Axis::symmetric(20e-3, 2001);
  const Pattern p = synthetic(ax, 1000.0, 5e-3, 0.0);
  try {
    extract_fringes(p);
    FAIL() << "expected AnalysisError";
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("no fringes"), std::string::npos) << e.what();
  }
}

TEST(ExtractFringes, TooFewFringes) {
  const Axis ax = Axis::symmetric(20e-3, 2001);
  const Pattern p = synthetic(ax, 2.0 * kPi / 4e-3, 2e-3);  // window ~9 mm holds ~2 periods
  try {
    extract_fringes(p);
    FAIL() << "expected AnalysisError";
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("too few fringes"), std::string::npos) << e.what();
  }
}

TEST(ExtractFringes, RejectsTwoDimensionalPatterns) {
  Pattern p;
  p.x = Axis::symmetric(1e-3, 32);
  p.y = Axis::symmetric(1e-3, 32);
  p.values.assign(32 * 32, 1.0);
  EXPECT_THROW(extract_fringes(p), AnalysisError);
}

TEST(ExtractFringes, RecoversSpacingWithinOneStep) {
  // Spacings from 10 grid steps to a quarter of the extent.
  const double extent = 10e-3;
  const Axis ax = Axis::symmetric(extent, 2001);
  const double lo = 10.0 * ax.step(), hi = extent / 4.0;
  for (int k = 0; k <= 24; ++k) {
    const double s = lo * std::pow(hi / lo, k / 24.0);
    const Pattern p = synthetic(ax, 2.0 * kPi / s, extent, 0.8, 0.3 * k);
    const FringeReport r = extract_fringes(p);
    EXPECT_NEAR(r.spacing, s, ax.step()) << s;
    EXPECT_GT(r.spacing, 0.0);
    EXPECT_GE(r.visibility, 0.0);
    EXPECT_LE(r.visibility, 1.0);
  }
}

TEST(ExtractFringes, VisibilityAndPhase) {
  const Axis ax = Axis::symmetric(20e-3, 4001);
  for (double v : {0.05, 0.3, 0.6, 0.95}) {
    const Pattern p = synthetic(ax, 2000.0, 7e-3, v, 0.7);
    const FringeReport r = extract_fringes(p);
    EXPECT_NEAR(r.visibility, v, 1e-6) << v;
    EXPECT_NEAR(std::remainder(r.phase - 0.7, 2 * kPi), 0.0, 1e-4) << v;
  }
}

TEST(ExtractFringes, OffCentreEnvelope) {
  const Axis ax = Axis::symmetric(20e-3, 4001);
  const Pattern p = synthetic(ax, 2500.0, 5e-3, 0.9, 0.0, 4e-3);
  const FringeReport r = extract_fringes(p);
  EXPECT_NEAR(r.spacing, 2.0 * kPi / 2500.0, ax.step());
  EXPECT_NEAR(r.envelope_center, 4e-3, 1e-6);
  EXPECT_NEAR(r.visibility, 0.9, 1e-6);
}

TEST(ExtractFringes, ReferenceSliceMatchesExactWidth) {
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const FringeReport r = extract_fringes(coincidence_slice(jd, 0.0, reference_axis(s)));
  EXPECT_NEAR(r.spacing / fringe_width(s).exact, 1.0, 0.01);
  EXPECT_NEAR(r.spacing / (2.0 * kPi / jd.theta2), 1.0, 1e-4);
  EXPECT_FALSE(r.methods_disagree);
}

TEST(ExtractFringes, EstimatorsAgreeOnEnginePatterns) {
  for (int variant = 0; variant < 4; ++variant) {
    Scenario s = ding_fig3();
    if (variant == 1) s.lens = Lens{0.1};
    if (variant == 2) s.lambda1 = s.lambda2;
    if (variant == 3) s.slit_separation = 0.3e-3;
    const JointDensity jd = joint_density(s);
    const Axis ax = Axis::symmetric(1.5 * default_y2_half_width(s), 6001);
    const FringeReport r = extract_fringes(coincidence_slice(jd, 0.0, ax));
    if (r.n_fringes_used < 6) continue;
    EXPECT_NEAR(r.spacing_peaks / r.spacing_spectral, 1.0, 0.02) << variant;
    EXPECT_FALSE(r.methods_disagree) << variant;
  }
}

TEST(ComparePatterns, IdenticalPatterns) {
  const Scenario s = ding_fig3();
  const Pattern p = coincidence_slice(joint_density(s), 0.0, reference_axis(s));
  const PatternComparison c = compare_patterns(p, p);
  EXPECT_EQ(c.max_abs_dev, 0.0);
  EXPECT_EQ(c.rms_dev, 0.0);
  EXPECT_DOUBLE_EQ(c.spacing_ratio, 1.0);
}

TEST(ComparePatterns, SymmetricUpToResampling) {
  const JointDensity jd = joint_density(ding_fig3());
  const Pattern a = coincidence_slice(jd, 0.0, Axis::symmetric(15e-3, 6001));
  const Pattern b = coincidence_slice(jd, 0.0, Axis::symmetric(15e-3, 4801));
  const Pattern b_shift = coincidence_slice(jd, 20e-6, Axis::symmetric(15e-3, 4801));
  const PatternComparison ab = compare_patterns(a, b), ba = compare_patterns(b, a);
  EXPECT_LT(ab.max_abs_dev, 1e-8);
  EXPECT_LT(ba.max_abs_dev, 1e-8);
  const PatternComparison x = compare_patterns(a, b_shift), y = compare_patterns(b_shift, a);
  EXPECT_GT(x.max_abs_dev, 1e-3);
  EXPECT_NEAR(x.max_abs_dev, y.max_abs_dev, 1e-8);
  // The rms averages over each argument's own samples, so it agrees only to quadrature accuracy.
  EXPECT_NEAR(x.rms_dev, y.rms_dev, 1e-6);
}

TEST(ComparePatterns, DisjointRangesThrow) {
  const Axis a{0.0, 1.0, 100}, b{2.0, 3.0, 100};
  Pattern pa, pb;
  pa.x = a;
  pa.values.assign(100, 1.0);
  pb.x = b;
  pb.values.assign(100, 1.0);
  EXPECT_THROW(compare_patterns(pa, pb), AnalysisError);
}

TEST(ComparePatterns, TwoDimensionalNeedsSharedAxes) {
  Pattern a, b;
  a.x = b.x = Axis::symmetric(1.0, 8);
  a.y = Axis::symmetric(1.0, 8);
  b.y = Axis::symmetric(2.0, 8);
  a.values.assign(64, 1.0);
  b.values.assign(64, 1.0);
  EXPECT_THROW(compare_patterns(a, b), AnalysisError);
  b.y = a.y;
  b.values[5] = 1.5;
  const PatternComparison c = compare_patterns(a, b);
  // Normalized by the larger of the two peaks.
  EXPECT_DOUBLE_EQ(c.max_abs_dev, 0.5 / 1.5);
  EXPECT_TRUE(std::isnan(c.spacing_ratio));
}

TEST(ComparePatterns, LensShortensFringes) {
  Scenario lensed = ding_fig3();
  lensed.lens = Lens{0.1};
  const Scenario plain = ding_fig3();
  const Axis ax = reference_axis(plain);
  const PatternComparison c =
      compare_patterns(coincidence_slice(joint_density(plain), 0.0, ax), coincidence_slice(joint_density(lensed), 0.0, ax));
  EXPECT_NEAR(c.spacing_ratio / (3.2955 / 2.6715), 1.0, 0.005);
}

TEST(VisibilityVsBucket, ZeroWidthIsPointDetector) {
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const Axis ax = reference_axis(s);
  const BucketTable t = visibility_vs_bucket(jd, {0.0}, ax);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_NEAR(t.rows[0].visibility, extract_fringes(coincidence_slice(jd, 0.0, ax)).visibility, 1e-12);
}

TEST(VisibilityVsBucket, MeasuredWindowsStrictlyDecreasing) {
  const Scenario s = ding_fig3();
  const BucketTable t = visibility_vs_bucket(joint_density(s), {0.2e-3, 1e-3}, reference_axis(s));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_GT(t.rows[0].visibility, t.rows[1].visibility);
  EXPECT_TRUE(t.monotone);
}

TEST(VisibilityVsBucket, NonIncreasingUpToOnePeriod) {
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const double period = 2.0 * kPi / jd.theta1;
  std::vector<double> widths;
  for (int i = 0; i <= 16; ++i) widths.push_back(period * i / 16.0);
  const BucketTable t = visibility_vs_bucket(jd, widths, reference_axis(s));
  EXPECT_TRUE(t.monotone);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i].visibility, t.rows[i - 1].visibility + 1e-9);
}

TEST(VisibilityVsBucket, FullPeriodWindowCancelsFringes) {
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const BucketTable t = visibility_vs_bucket(jd, {2.0 * kPi / jd.theta1}, reference_axis(s));
  EXPECT_LT(t.rows[0].visibility, 1e-3);
}

TEST(VisibilityVsBucket, FullPeriodCancelsWhenEnvelopeIsFlatAcrossTheWindow) {
  // Wide slit separation: the particle-1 envelope spans many fringe periods, so
  // the window integral approaches the bare cosine integral.
  Scenario s = ding_fig3();
  s.slit_separation = 3e-3;
  s.source.omega = 30e-3;
  const JointDensity jd = joint_density(s);
  const double period = 2.0 * kPi / jd.theta1;
  const Axis ax = Axis::symmetric(default_y2_half_width(s), 8001);
  const BucketTable t = visibility_vs_bucket(jd, {0.0, period}, ax);
  EXPECT_GT(t.rows[0].visibility, 0.9);
  EXPECT_LT(t.rows[1].visibility, 1e-3);
}

TEST(VisibilityVsBucket, RejectsBadWidths) {
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  EXPECT_THROW(visibility_vs_bucket(jd, {1e-3, 0.5e-3}, reference_axis(s)), AnalysisError);
  EXPECT_THROW(visibility_vs_bucket(jd, {-1e-3}, reference_axis(s)), AnalysisError);
}

TEST(VisibilityAt, MarginalShowsNoFirstOrderFringes) {
  const Scenario s = ding_fig3();
  const JointDensity jd = joint_density(s);
  const Pattern m = marginal_particle1(jd, Axis::symmetric(4.0 * std::sqrt(jd.approximation.delta1), 4001));
  EXPECT_LT(visibility_at(m, 2.0 * kPi / jd.theta1), 1e-3);
}
