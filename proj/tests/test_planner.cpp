#include "sim/planner.hpp"

#include <gtest/gtest.h>

namespace sim {
namespace {

PlannerInput make_input(double mean_alt = 10.0) {
  PlannerInput input;
  input.belief.mean = (Vec(2) << mean_alt, 0.0).finished();
  input.belief.cov = 0.01 * Mat::Identity(2, 2);
  input.measurements = {(Vec(2) << mean_alt, 0.0).finished()};
  input.alarm_step = 512;
  input.context = PlanningContext{10.0, 0.0, 50.0, 1.0};
  return input;
}

InputBounds bounds1(double lo, double hi) {
  return {Vec::Constant(1, lo), Vec::Constant(1, hi)};
}

TEST(PlanTarget, CenteredBand) {
  const RawTheta theta = plan_target(make_input());
  EXPECT_DOUBLE_EQ(theta.theta1(0), 1.0);
  EXPECT_DOUBLE_EQ(theta.theta1(1), 0.0);
  EXPECT_DOUBLE_EQ(theta.theta2, 9.5);
  EXPECT_DOUBLE_EQ(theta.theta3, 10.5);
  const auto validation = validate_params(TargetForm::kStrip, theta.theta1,
                                          theta.theta2, theta.theta3);
  EXPECT_TRUE(validation.ok());
}

TEST(PlanTarget, ClampsToEnvelopeTop) {
  PlannerInput input = make_input();
  input.context.setpoint = 49.9;
  const RawTheta theta = plan_target(input);
  EXPECT_DOUBLE_EQ(theta.theta2, 49.0);
  EXPECT_DOUBLE_EQ(theta.theta3, 50.0);
}

TEST(PlanTarget, InfeasibleGeometryIsPlannerError) {
  PlannerInput input = make_input();
  input.context = PlanningContext{10.0, 10.0, 10.5, 1.0};
  EXPECT_THROW(plan_target(input), PlannerError);
}

TEST(PlanTarget, Deterministic) {
  const RawTheta a = plan_target(make_input());
  const RawTheta b = plan_target(make_input());
  EXPECT_TRUE(a.theta1 == b.theta1);
  EXPECT_DOUBLE_EQ(a.theta2, b.theta2);
  EXPECT_DOUBLE_EQ(a.theta3, b.theta3);
}

TEST(VerifyTarget, DefaultBandSafeAndFeasible) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  const RawTheta theta = plan_target(input);
  const Verdict verdict =
      verify_target(theta, model, input.belief, bounds1(-5, 5), 500, 0.8,
                    input.context);
  EXPECT_TRUE(verdict.safe);
  EXPECT_TRUE(verdict.feasible);
  EXPECT_GE(verdict.achievable_probability, 0.95);
  EXPECT_TRUE(verdict.reasons.empty());
}

// Zero-noise variant: the achievable probability must reach the band mass of
// the propagated covariance with the mean centered.
TEST(VerifyTarget, ZeroNoiseAchievesPropagatedBandMass) {
  const LinearModel model = build_default_drone_model(0.02, 0, 0, 0, 0);
  PlannerInput input = make_input(9.0);
  input.belief.cov = (Mat(2, 2) << 0.04, 0, 0, 0.0).finished();
  const RawTheta theta = plan_target(input);
  const Verdict verdict = verify_target(theta, model, input.belief,
                                        bounds1(-5, 5), 500, 0.8, input.context);
  // With Q = 0 and theta1 = e_z the projected sd stays sqrt(0.04) = 0.2;
  // centering the mean gives the band mass for a width-1 strip.
  const double expected = band_probability(10.0, 0.2, 9.5, 10.5);
  EXPECT_TRUE(verdict.feasible);
  EXPECT_GE(verdict.achievable_probability, expected - 1e-6);
}

TEST(VerifyTarget, BandOutsideEnvelopeUnsafe) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  RawTheta theta;
  theta.theta1 = (Vec(2) << 1.0, 0.0).finished();
  theta.theta2 = 55.0;
  theta.theta3 = 56.0;
  const Verdict verdict =
      verify_target(theta, model, input.belief, bounds1(-5, 5), 200, 0.8,
                    input.context);
  EXPECT_FALSE(verdict.safe);
  ASSERT_FALSE(verdict.reasons.empty());
  EXPECT_EQ(verdict.reasons[0], "outside envelope");
}

TEST(VerifyTarget, ZeroAuthorityInfeasible) {
  const LinearModel model = build_default_drone_model(0.02);
  PlannerInput input = make_input(5.0);  // 5 m below the band
  input.belief.cov = 1e-4 * Mat::Identity(2, 2);
  const RawTheta theta = plan_target(input);
  const Verdict verdict = verify_target(theta, model, input.belief,
                                        bounds1(0.0, 0.0), 200, 0.8,
                                        input.context);
  EXPECT_TRUE(verdict.safe);
  EXPECT_FALSE(verdict.feasible);
  EXPECT_LT(verdict.achievable_probability, 0.1);
}

TEST(VerifyTarget, NonAxisDirectionUnverifiable) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  RawTheta theta;
  theta.theta1 = (Vec(2) << 1.0, 0.5).finished();
  theta.theta2 = 9.5;
  theta.theta3 = 10.5;
  const Verdict verdict =
      verify_target(theta, model, input.belief, bounds1(-5, 5), 200, 0.8,
                    input.context);
  EXPECT_FALSE(verdict.safe);
  ASSERT_FALSE(verdict.reasons.empty());
  EXPECT_EQ(verdict.reasons[0], "unverifiable direction");
}

TEST(VerifyTarget, InvalidParametersCarryValidationFindings) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  RawTheta theta;
  theta.theta1 = (Vec(2) << 1.0, 0.0).finished();
  theta.theta2 = 11.0;
  theta.theta3 = 9.0;
  const Verdict verdict =
      verify_target(theta, model, input.belief, bounds1(-5, 5), 200, 0.8,
                    input.context);
  EXPECT_FALSE(verdict.safe);
  EXPECT_FALSE(verdict.feasible);
  ASSERT_EQ(verdict.reasons.size(), 1u);
  EXPECT_EQ(verdict.reasons[0], "empty strip");
}

TEST(PlannerRequest, WireFormatIsStable) {
  PlannerInput input;
  input.belief.mean = (Vec(2) << 10.0, 0.0).finished();
  input.belief.cov = (Mat(2, 2) << 1.0, 0.0, 0.0, 2.0).finished();
  input.measurements = {(Vec(2) << 10.5, -0.25).finished()};
  input.alarm_step = 512;
  input.context = PlanningContext{10.0, 0.0, 50.0, 1.0};
  EXPECT_EQ(planner_request_json(input),
            "{\"belief\":{\"mean\":[10.0,0.0],\"cov\":[[1.0,0.0],[0.0,2.0]]},"
            "\"form\":\"strip\",\"context\":{\"setpoint\":10.0,\"z_min\":0.0,"
            "\"z_max\":50.0,\"width\":1.0},\"measurements\":[[10.5,-0.25]],"
            "\"alarm_step\":512}");
}

TEST(ExternalPlanner, EchoPlannerMatchesRuleBased) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  ExternalPlannerConfig config{
      "read line; echo '{\"theta1\":[1.0,0.0],\"theta2\":9.5,\"theta3\":10.5}'",
      5.0};
  const ExternalPlanResult result = external_plan_target(
      input, config, model, bounds1(-5, 5), 200, 0.8);
  EXPECT_TRUE(result.from_external);
  EXPECT_TRUE(result.fallback_reasons.empty());
  const RawTheta rule = plan_target(input);
  EXPECT_TRUE(result.theta.theta1 == rule.theta1);
  EXPECT_DOUBLE_EQ(result.theta.theta2, rule.theta2);
  EXPECT_DOUBLE_EQ(result.theta.theta3, rule.theta3);
}

TEST(ExternalPlanner, EmptyStripFallsBack) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  ExternalPlannerConfig config{
      "read line; echo '{\"theta1\":[1.0,0.0],\"theta2\":10.5,\"theta3\":9.5}'",
      5.0};
  const ExternalPlanResult result = external_plan_target(
      input, config, model, bounds1(-5, 5), 200, 0.8);
  EXPECT_FALSE(result.from_external);
  ASSERT_FALSE(result.fallback_reasons.empty());
  EXPECT_EQ(result.fallback_reasons[0], "empty strip");
  EXPECT_DOUBLE_EQ(result.theta.theta2, 9.5);  // rule-based fallback
}

TEST(ExternalPlanner, MalformedOutputFallsBack) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  ExternalPlannerConfig config{"read line; echo 'not json at all'", 5.0};
  const ExternalPlanResult result = external_plan_target(
      input, config, model, bounds1(-5, 5), 200, 0.8);
  EXPECT_FALSE(result.from_external);
  ASSERT_FALSE(result.fallback_reasons.empty());
  EXPECT_EQ(result.fallback_reasons[0], "malformed planner output");
}

TEST(ExternalPlanner, TimeoutFallsBack) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  ExternalPlannerConfig config{"sleep 30", 0.2};
  const ExternalPlanResult result = external_plan_target(
      input, config, model, bounds1(-5, 5), 200, 0.8);
  EXPECT_FALSE(result.from_external);
  ASSERT_FALSE(result.fallback_reasons.empty());
  EXPECT_EQ(result.fallback_reasons[0], "planner timeout");
}

TEST(ExternalPlanner, UnsafeExternalBandFallsBack) {
  const LinearModel model = build_default_drone_model(0.02);
  const PlannerInput input = make_input();
  ExternalPlannerConfig config{
      "read line; echo '{\"theta1\":[1.0,0.0],\"theta2\":55.0,\"theta3\":56.0}'",
      5.0};
  const ExternalPlanResult result = external_plan_target(
      input, config, model, bounds1(-5, 5), 200, 0.8);
  EXPECT_FALSE(result.from_external);
  ASSERT_FALSE(result.fallback_reasons.empty());
  EXPECT_EQ(result.fallback_reasons[0], "outside envelope");
}

}  // namespace
}  // namespace sim
