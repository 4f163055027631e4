#include "sim/sensing.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace sim {
namespace {

TEST(Measure, NoiseFreeIsExact) {
  LinearModel model(Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Identity(2, 2),
                    Mat::Zero(2, 2), Mat::Zero(2, 2), 1.0, {"a", "b"});
  RandomSource rng(5);
  const State x = (Vec(2) << 10.0, -0.5).finished();
  const Vec y = measure(model, x, rng);
  EXPECT_DOUBLE_EQ(y(0), 10.0);
  EXPECT_DOUBLE_EQ(y(1), -0.5);
}

TEST(Measure, DefaultModelIdentityOutput) {
  const LinearModel model =
      build_default_drone_model(0.02, 0.0, 0.0);  // R = 0
  RandomSource rng(5);
  const State x = (Vec(2) << 10.0, -0.5).finished();
  const Vec y = measure(model, x, rng);
  EXPECT_DOUBLE_EQ(y(0), 10.0);
  EXPECT_DOUBLE_EQ(y(1), -0.5);
}

TEST(Measure, DeterministicGivenSeed) {
  const LinearModel model = build_default_drone_model(0.02);
  const State x = (Vec(2) << 10.0, 0.0).finished();
  RandomSource a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    EXPECT_TRUE(measure(model, x, a) == measure(model, x, b));
  }
}

// Monte-Carlo check of the configured gps noise scale.
TEST(Measure, SampleStdMatchesSigmaGps) {
  const LinearModel model = build_default_drone_model(0.02);
  const State x = (Vec(2) << 10.0, 0.0).finished();
  RandomSource rng(42);
  const int draws = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double d = measure(model, x, rng)(0) - x(0);
    sum += d;
    sumsq += d * d;
  }
  const double var = (sumsq - sum * sum / draws) / (draws - 1);
  EXPECT_NEAR(std::sqrt(var), 0.1, 0.002);
}

TEST(ApplyAttack, PreAttackStepsAreUntouched) {
  AttackScenario attack{AttackKind::kBias, 0, 500, 3.0, 0.0};
  const Vec y = (Vec(2) << 10.0, 0.0).finished();
  EXPECT_TRUE(apply_attack(attack, 499, y) == y);
  EXPECT_TRUE(apply_attack(attack, 0, y) == y);
}

TEST(ApplyAttack, BiasAddsMagnitudeFromStart) {
  AttackScenario attack{AttackKind::kBias, 0, 500, 3.0, 0.0};
  const Vec y = (Vec(2) << 10.0, 0.0).finished();
  const Vec out = apply_attack(attack, 500, y);
  EXPECT_DOUBLE_EQ(out(0), 13.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
}

TEST(ApplyAttack, RampGrowsLinearly) {
  AttackScenario attack{AttackKind::kRamp, 0, 500, 0.0, 0.01};
  const Vec y = (Vec(2) << 10.0, 0.0).finished();
  const Vec out = apply_attack(attack, 600, y);
  EXPECT_DOUBLE_EQ(out(0), 11.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
}

TEST(ApplyAttack, NonTargetSensorsBitIdentical) {
  AttackScenario attack{AttackKind::kBias, 0, 10, 2.5, 0.0};
  const Vec y = (Vec(2) << 10.123456789, -0.987654321).finished();
  const Vec out = apply_attack(attack, 50, y);
  EXPECT_EQ(out(1), y(1));  // exact bit equality
}

TEST(ApplyAttack, NoneKindIsIdentityForEverySeed) {
  const LinearModel model = build_default_drone_model(0.02);
  AttackScenario none{AttackKind::kNone, 0, 0, 0.0, 0.0};
  const State x = (Vec(2) << 10.0, 0.0).finished();
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    RandomSource rng(seed);
    for (int step = 0; step < 50; ++step) {
      const Vec y = measure(model, x, rng);
      EXPECT_TRUE(apply_attack(none, step, y) == y);
    }
  }
}

// The attacked-minus-clean difference follows the schedule alone: no
// interaction with the noise realization beyond float rounding, and the
// untouched sensor stays bit-identical.
TEST(ApplyAttack, DifferenceEqualsSchedule) {
  const LinearModel model = build_default_drone_model(0.02);
  AttackScenario attack{AttackKind::kRamp, 0, 20, 0.0, 0.05};
  RandomSource rng(9);
  const State x = (Vec(2) << 10.0, 0.0).finished();
  for (int step = 0; step < 100; ++step) {
    const Vec y = measure(model, x, rng);
    const Vec diff = apply_attack(attack, step, y) - y;
    const double expected =
        step < 20 ? 0.0 : 0.05 * static_cast<double>(step - 20);
    EXPECT_NEAR(diff(0), expected, 1e-12);
    EXPECT_EQ(diff(1), 0.0);
  }
}

TEST(ApplyAttack, NegativeStepRejected) {
  AttackScenario attack{AttackKind::kBias, 0, 0, 1.0, 0.0};
  EXPECT_THROW(apply_attack(attack, -1, Vec::Zero(2)), ContractViolation);
}

TEST(ValidateScenario, ChecksTargetSensor) {
  const LinearModel model = build_default_drone_model(0.02);
  AttackScenario bad{AttackKind::kBias, 7, 0, 1.0, 0.0};
  EXPECT_THROW(validate_scenario(bad, model), ContractViolation);
  AttackScenario none{AttackKind::kNone, 7, -3, 1e308 * 10, 0.0};
  EXPECT_NO_THROW(validate_scenario(none, model));  // none ignores the rest
}

}  // namespace
}  // namespace sim
