#pragma once

#include <string>
#include <vector>

#include "sim/dynamics.hpp"
#include "sim/recovery.hpp"
#include "sim/target_set.hpp"

namespace sim {

// Mission context handed to the planner: desired altitude setpoint, the safe
// envelope the target set must stay inside, and the desired band width.
struct PlanningContext {
  double setpoint = 10.0;
  double z_min = 0.0;
  double z_max = 50.0;
  double width = 1.0;
};

// Observations + form + context — everything a planner (built-in or external)
// receives. Measurements are the last k sensor readings as reported to the
// estimator, oldest first.
struct PlannerInput {
  GaussianBelief belief;
  std::vector<Vec> measurements;
  int alarm_step = 0;
  TargetForm form = TargetForm::kStrip;
  PlanningContext context;
};

// Raw target-set parameter bundle as produced by a planner, before
// validation.
struct RawTheta {
  Vec theta1;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

// Verifier verdict on a proposed target set.
struct Verdict {
  bool safe = false;
  bool feasible = false;
  double achievable_probability = 0.0;
  std::vector<std::string> reasons;
};

// Rule-based planner: an axis-aligned altitude band of the requested width,
// centered on the setpoint clamped into the safe envelope. Deterministic.
RawTheta plan_target(const PlannerInput& input);

// Certifies safety (band inside the envelope; only axis-aligned directions
// are verifiable) and feasibility (the recovery solver can reach probability
// p_min within k_max steps). Invalid parameters yield an unsafe, infeasible
// verdict carrying the validation findings.
Verdict verify_target(const RawTheta& theta, const LinearModel& model,
                      const GaussianBelief& belief, const InputBounds& bounds,
                      int k_max, double p_min, const PlanningContext& context);

struct ExternalPlannerConfig {
  std::string command;           // run through /bin/sh -c
  double timeout_seconds = 10.0;
};

struct ExternalPlanResult {
  RawTheta theta;
  bool from_external = false;
  std::vector<std::string> fallback_reasons;  // empty when external accepted
};

// One JSON exchange with an external planner process. Malformed output,
// timeouts, validation failures and verifier rejections each fall back to the
// rule-based planner with a named reason; an episode never aborts because a
// planner misbehaved.
ExternalPlanResult external_plan_target(const PlannerInput& input,
                                        const ExternalPlannerConfig& config,
                                        const LinearModel& model,
                                        const InputBounds& bounds, int k_max,
                                        double p_min);

// Wire encoding of the request (single line, no trailing newline).
std::string planner_request_json(const PlannerInput& input);

}  // namespace sim
