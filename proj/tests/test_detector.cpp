#include "sim/detector.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "sim/recovery.hpp"
#include "sim/sensing.hpp"

namespace sim {
namespace {

GaussianBelief belief_at(double z, double v) {
  return {(Vec(2) << z, v).finished(), Mat::Zero(2, 2)};
}

TEST(Residual, ZeroWhenMeasurementMatchesPrediction) {
  const LinearModel model = build_default_drone_model(0.02);
  const Vec y = (Vec(2) << 10.0, 0.0).finished();
  EXPECT_DOUBLE_EQ(residual(model, belief_at(10.0, 0.0), y, 0), 0.0);
}

TEST(Residual, BiasPassesThrough) {
  const LinearModel model = build_default_drone_model(0.02);
  const Vec y = (Vec(2) << 13.0, 0.0).finished();
  EXPECT_DOUBLE_EQ(residual(model, belief_at(10.0, 0.0), y, 0), 3.0);
}

TEST(Residual, RejectsBadSensorIndex) {
  const LinearModel model = build_default_drone_model(0.02);
  EXPECT_THROW(residual(model, belief_at(0, 0), Vec::Zero(2), 2),
               ContractViolation);
}

// Attack-free closed loop: the |innovation| mean matches E|N(0, s^2)| for the
// innovation scale reported by the filter itself.
TEST(Residual, InnovationMagnitudeMatchesGaussianStatistics) {
  const LinearModel model = build_default_drone_model(0.02);
  const InputBounds bounds{Vec::Constant(1, -5.0), Vec::Constant(1, 5.0)};
  const NominalController ctrl{2.0, 2.0, 10.0};
  RandomSource rng(2024);

  State x = (Vec(2) << 10.0, 0.0).finished();
  GaussianBelief prior{x, model.R()};
  double abs_sum = 0.0;
  double innovation_var = 0.0;
  const int steps = 10000;
  for (int t = 0; t < steps; ++t) {
    const Vec y = measure(model, x, rng);
    abs_sum += std::abs(residual(model, prior, y, 0));
    innovation_var =
        (model.C() * prior.cov * model.C().transpose() + model.R())(0, 0);
    const GaussianBelief posterior = kalman_update(model, prior, y, {0, 1});
    const Vec u = nominal_control(ctrl, posterior, bounds);
    x = step_truth(model, x, u, model.sample_process_noise(rng));
    prior = predict_belief(model, posterior, u);
  }
  const double s = std::sqrt(innovation_var);  // steady-state scale
  const double expected = s * std::sqrt(2.0 / M_PI);
  EXPECT_NEAR(abs_sum / steps, expected, 0.05 * expected);
}

TEST(Cusum, SubcriticalResidualKeepsZeroStatistic) {
  CusumDetector d(0.5, 1.0);
  d.step(0.4, 0);
  EXPECT_DOUBLE_EQ(d.statistic(), 0.0);
  EXPECT_FALSE(d.alarm_step().has_value());
}

TEST(Cusum, ArithmeticRampFiresOnThirdStep) {
  CusumDetector d(0.2, 1.0);
  d.step(0.7, 0);
  EXPECT_DOUBLE_EQ(d.statistic(), 0.5);
  d.step(0.7, 1);
  EXPECT_DOUBLE_EQ(d.statistic(), 1.0);
  EXPECT_FALSE(d.alarm_step().has_value());  // threshold is strict
  d.step(0.7, 2);
  EXPECT_DOUBLE_EQ(d.statistic(), 1.5);
  ASSERT_TRUE(d.alarm_step().has_value());
  EXPECT_EQ(*d.alarm_step(), 2);
}

TEST(Cusum, SteppingFiredDetectorIsContractViolation) {
  CusumDetector d(0.0, 0.5);
  d.step(1.0, 0);
  ASSERT_TRUE(d.alarm_step().has_value());
  EXPECT_THROW(d.step(0.0, 1), ContractViolation);
}

TEST(Cusum, SignInvariant) {
  CusumDetector pos(0.2, 10.0), neg(0.2, 10.0);
  for (int i = 0; i < 20; ++i) {
    pos.step(0.7, i);
    neg.step(-0.7, i);
    EXPECT_DOUBLE_EQ(pos.statistic(), neg.statistic());
  }
}

TEST(BeliefBuffer, KeepsNewestWithinCapacity) {
  BeliefBuffer buf(4);
  for (int i = 0; i < 10; ++i) buf.push(i, belief_at(i, 0));
  EXPECT_EQ(buf.size(), 4u);
  EXPECT_FALSE(buf.newest_at_or_before(5).has_value());
  auto entry = buf.newest_at_or_before(8);
  ASSERT_TRUE(entry.has_value());
  EXPECT_EQ(entry->first, 8);
}

TEST(BeliefBuffer, RejectsNonIncreasingSteps) {
  BeliefBuffer buf(4);
  buf.push(3, belief_at(0, 0));
  EXPECT_THROW(buf.push(3, belief_at(0, 0)), ContractViolation);
  EXPECT_THROW(buf.push(1, belief_at(0, 0)), ContractViolation);
}

TEST(RollbackAnchor, WindowZeroReturnsAlarmStepEntry) {
  BeliefBuffer buf(64);
  for (int i = 0; i < 20; ++i) buf.push(i, belief_at(i, 0));
  const auto [step, belief] = rollback_anchor(buf, 19, 0);
  EXPECT_EQ(step, 19);
  EXPECT_DOUBLE_EQ(belief.mean(0), 19.0);
}

TEST(RollbackAnchor, IndexArithmetic) {
  BeliefBuffer buf(64);
  for (int i = 480; i <= 520; ++i) buf.push(i, belief_at(i, 0));
  const auto [step, belief] = rollback_anchor(buf, 510, 20);
  EXPECT_EQ(step, 490);
  EXPECT_DOUBLE_EQ(belief.mean(0), 490.0);
}

TEST(RollbackAnchor, UnderflowIsEpisodeError) {
  BeliefBuffer buf(64);
  for (int i = 100; i < 120; ++i) buf.push(i, belief_at(i, 0));
  EXPECT_THROW(rollback_anchor(buf, 110, 60), EpisodeError);
}

// Expected alarm delay must not grow with attack magnitude. Uses the real
// closed loop (estimator + nominal controller + detector) per magnitude.
TEST(Detector, DelayMonotoneInAttackMagnitude) {
  const LinearModel model = build_default_drone_model(0.02);
  const InputBounds bounds{Vec::Constant(1, -5.0), Vec::Constant(1, 5.0)};
  const NominalController ctrl{2.0, 2.0, 10.0};
  const int start = 50;
  const int cap = 1500;
  const int seeds = 500;

  std::vector<double> mean_delay;
  for (double mult : {1.0, 2.0, 3.0, 5.0}) {
    AttackScenario attack{AttackKind::kBias, 0, start, 0.1 * mult, 0.0};
    double total = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      RandomSource rng(derive_seed(17, static_cast<std::uint64_t>(seed)));
      State x = (Vec(2) << 10.0, 0.0).finished();
      GaussianBelief prior{x, model.R()};
      CusumDetector detector(0.2, 100.0);
      int delay = cap;
      for (int t = 0; t < start + cap; ++t) {
        const Vec y = apply_attack(attack, t, measure(model, x, rng));
        detector.step(residual(model, prior, y, 0), t);
        if (detector.alarm_step()) {
          delay = *detector.alarm_step() - start;
          break;
        }
        const GaussianBelief posterior = kalman_update(model, prior, y, {0, 1});
        const Vec u = nominal_control(ctrl, posterior, bounds);
        x = step_truth(model, x, u, model.sample_process_noise(rng));
        prior = predict_belief(model, posterior, u);
      }
      total += delay;
    }
    mean_delay.push_back(total / seeds);
  }
  for (std::size_t i = 1; i < mean_delay.size(); ++i) {
    EXPECT_LE(mean_delay[i], mean_delay[i - 1] + 1e-9)
        << "magnitude level " << i;
  }
}

}  // namespace
}  // namespace sim
