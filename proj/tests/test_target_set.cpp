#include "sim/target_set.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "sim/rng.hpp"

namespace sim {
namespace {

Strip default_band() {
  return Strip{(Vec(2) << 1.0, 0.0).finished(), 9.5, 10.5};
}

TEST(ValidateParams, AcceptsDefaultBand) {
  const auto v =
      validate_params(TargetForm::kStrip, (Vec(2) << 1.0, 0.0).finished(),
                      9.5, 10.5);
  ASSERT_TRUE(v.ok());
  EXPECT_TRUE(v.violations.empty());
  EXPECT_DOUBLE_EQ(v.strip->theta2, 9.5);
}

TEST(ValidateParams, ReportsZeroDirection) {
  const auto v = validate_params(TargetForm::kStrip, Vec::Zero(2), 9.5, 10.5);
  EXPECT_FALSE(v.ok());
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0], "zero direction");
}

TEST(ValidateParams, ReportsEmptyStrip) {
  const auto v = validate_params(TargetForm::kStrip,
                                 (Vec(2) << 1.0, 0.0).finished(), 11.0, 9.0);
  EXPECT_FALSE(v.ok());
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0], "empty strip");
}

TEST(ValidateParams, ReportsEveryViolation) {
  const auto v = validate_params(TargetForm::kStrip, Vec::Zero(2), 11.0, 9.0);
  EXPECT_FALSE(v.ok());
  EXPECT_EQ(v.violations.size(), 2u);
}

TEST(ValidateParams, ReportsNonFinite) {
  const auto v = validate_params(
      TargetForm::kStrip, (Vec(2) << 1.0, 0.0).finished(),
      std::numeric_limits<double>::quiet_NaN(), 10.5);
  EXPECT_FALSE(v.ok());
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0], "non-finite parameter");
}

TEST(Contains, VelocityUnconstrainedByAltitudeStrip) {
  EXPECT_TRUE(contains(default_band(), (Vec(2) << 10.0, -3.0).finished()));
}

TEST(Contains, ClosedBoundary) {
  EXPECT_TRUE(contains(default_band(), (Vec(2) << 9.5, 0.0).finished()));
  EXPECT_FALSE(contains(default_band(), (Vec(2) << 9.499, 0.0).finished()));
}

TEST(DistanceToCenter, ZeroOnCenterPlane) {
  EXPECT_DOUBLE_EQ(
      distance_to_center(default_band(), (Vec(2) << 10.0, 7.0).finished()),
      0.0);
}

TEST(DistanceToCenter, SimpleOffset) {
  EXPECT_DOUBLE_EQ(
      distance_to_center(default_band(), (Vec(2) << 10.25, 0.0).finished()),
      0.25);
}

TEST(DistanceToCenter, ScaledParameters) {
  const Strip scaled{(Vec(2) << 2.0, 0.0).finished(), 19.0, 21.0};
  EXPECT_NEAR(
      distance_to_center(scaled, (Vec(2) << 10.25, 0.0).finished()), 0.25,
      1e-12);
}

// Positive-scaling invariance of all three strip operations.
TEST(Strip, PositiveScalingInvariance) {
  RandomSource rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    Vec theta1 = (Vec(2) << rng.gaussian(), rng.gaussian()).finished();
    if (theta1.norm() == 0.0) continue;
    double lo = rng.gaussian(), hi = lo + std::abs(rng.gaussian()) + 0.1;
    const Strip s{theta1, lo, hi};
    const double c = std::abs(rng.gaussian()) + 0.1;
    const Strip scaled{c * theta1, c * lo, c * hi};

    const Vec x = (Vec(2) << rng.gaussian() * 3, rng.gaussian() * 3).finished();
    EXPECT_EQ(contains(s, x), contains(scaled, x));
    EXPECT_NEAR(distance_to_center(s, x), distance_to_center(scaled, x), 1e-9);

    GaussianBelief b{x, (Mat(2, 2) << 0.3, 0.1, 0.1, 0.2).finished()};
    EXPECT_NEAR(strip_probability(s, b), strip_probability(scaled, b), 1e-9);
  }
}

TEST(Strip, ContainsIffDistanceWithinHalfWidth) {
  RandomSource rng(72);
  for (int trial = 0; trial < 500; ++trial) {
    Vec theta1 = (Vec(2) << rng.gaussian(), rng.gaussian()).finished();
    if (theta1.norm() < 1e-6) continue;
    const double lo = rng.gaussian();
    const double hi = lo + std::abs(rng.gaussian());
    const Strip s{theta1, lo, hi};
    const Vec x = (Vec(2) << rng.gaussian() * 2, rng.gaussian() * 2).finished();
    const double half = (hi - lo) / (2.0 * theta1.norm());
    EXPECT_EQ(contains(s, x), distance_to_center(s, x) <= half + 1e-12);
  }
}

TEST(StripProbability, PointMassIndicator) {
  GaussianBelief inside{(Vec(2) << 10.0, 0.0).finished(), Mat::Zero(2, 2)};
  GaussianBelief outside{(Vec(2) << 12.0, 0.0).finished(), Mat::Zero(2, 2)};
  EXPECT_DOUBLE_EQ(strip_probability(default_band(), inside), 1.0);
  EXPECT_DOUBLE_EQ(strip_probability(default_band(), outside), 0.0);
}

TEST(StripProbability, CenteredErfValue) {
  // sd = 0.25 on a width-1 band centered at the mean: Phi(2) - Phi(-2).
  GaussianBelief b{(Vec(2) << 10.0, 0.0).finished(),
                   (Mat(2, 2) << 0.0625, 0, 0, 0).finished()};
  EXPECT_NEAR(strip_probability(default_band(), b), 0.954499736, 1e-4);
}

// Monte-Carlo oracle: analytic probability vs sampled frequency.
TEST(StripProbability, MatchesSampledFrequency) {
  RandomSource rng(4242);
  const int samples = 100000;
  for (int trial = 0; trial < 10; ++trial) {
    Vec theta1 = (Vec(2) << rng.gaussian(), rng.gaussian()).finished();
    if (theta1.norm() < 0.1) theta1 << 1.0, 0.0;
    const double lo = rng.gaussian();
    const double hi = lo + 2.0 * std::abs(rng.gaussian()) + 0.1;
    const Strip s{theta1, lo, hi};

    Mat g(2, 2);
    g << rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian();
    const Mat cov = g * g.transpose() + 0.05 * Mat::Identity(2, 2);
    const Vec mean = (Vec(2) << rng.gaussian(), rng.gaussian()).finished();
    const GaussianBelief b{mean, cov};

    const Eigen::LLT<Mat> llt(cov);
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
      const Vec z = (Vec(2) << rng.gaussian(), rng.gaussian()).finished();
      if (contains(s, mean + llt.matrixL() * z)) ++hits;
    }
    EXPECT_NEAR(strip_probability(s, b),
                static_cast<double>(hits) / samples, 0.01);
  }
}

TEST(StripProbability, InflatedCovarianceLowersCenteredMass) {
  const Strip s = default_band();
  double prev = 1.0;
  for (double eps : {0.0, 0.01, 0.05, 0.2, 1.0}) {
    GaussianBelief b{(Vec(2) << 10.0, 0.0).finished(),
                     eps * Mat::Identity(2, 2)};
    const double p = strip_probability(s, b);
    EXPECT_LE(p, prev + 1e-12);
    prev = p;
  }
}

}  // namespace
}  // namespace sim
