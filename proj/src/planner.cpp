#include "sim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sim/subprocess.hpp"

namespace sim {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_context(const PlanningContext& context) {
  if (!(context.z_min < context.z_max)) {
    throw ContractViolation("planning context requires z_min < z_max");
  }
  if (!(context.width > 0.0)) {
    throw ContractViolation("planning context requires width > 0");
  }
}

ordered_json vec_to_json(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

bool parse_theta(const std::string& line, Eigen::Index n, RawTheta* out) {
  nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return false;
  if (!doc.contains("theta1") || !doc.contains("theta2") ||
      !doc.contains("theta3")) {
    return false;
  }
  const auto& t1 = doc["theta1"];
  if (!t1.is_array() || !doc["theta2"].is_number() ||
      !doc["theta3"].is_number()) {
    return false;
  }
  Vec theta1(static_cast<Eigen::Index>(t1.size()));
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (!t1[i].is_number()) return false;
    theta1(static_cast<Eigen::Index>(i)) = t1[i].get<double>();
  }
  if (theta1.size() != n) return false;
  out->theta1 = theta1;
  out->theta2 = doc["theta2"].get<double>();
  out->theta3 = doc["theta3"].get<double>();
  return true;
}

}  // namespace

RawTheta plan_target(const PlannerInput& input) {
  check_context(input.context);
  if (input.form != TargetForm::kStrip) {
    throw ContractViolation("plan_target: unsupported target form");
  }
  const Eigen::Index n = input.belief.mean.size();
  if (n < 1) throw ContractViolation("plan_target: empty belief");

  const double half = 0.5 * input.context.width;
  if (input.context.z_max - input.context.z_min < input.context.width) {
    throw PlannerError("no admissible band");
  }
  const double center =
      std::clamp(input.context.setpoint, input.context.z_min + half,
                 input.context.z_max - half);

  RawTheta theta;
  theta.theta1 = Vec::Zero(n);
  theta.theta1(0) = 1.0;
  theta.theta2 = center - half;
  theta.theta3 = center + half;
  return theta;
}

Verdict verify_target(const RawTheta& theta, const LinearModel& model,
                      const GaussianBelief& belief, const InputBounds& bounds,
                      int k_max, double p_min, const PlanningContext& context) {
  check_context(context);
  Verdict verdict;

  const StripValidation validation =
      validate_params(TargetForm::kStrip, theta.theta1, theta.theta2,
                      theta.theta3);
  if (!validation.ok()) {
    verdict.reasons = validation.violations;
    return verdict;
  }
  const Strip& strip = *validation.strip;

  // Safety: only a direction parallel to the altitude axis has a geometry we
  // can check against the envelope; anything else is refused, not guessed.
  bool axis_aligned = strip.theta1(0) != 0.0;
  for (Eigen::Index i = 1; i < strip.theta1.size(); ++i) {
    if (strip.theta1(i) != 0.0) axis_aligned = false;
  }
  if (!axis_aligned) {
    verdict.reasons.emplace_back("unverifiable direction");
  } else {
    const double a = strip.theta1(0);
    const double z_lo = std::min(strip.theta2 / a, strip.theta3 / a);
    const double z_hi = std::max(strip.theta2 / a, strip.theta3 / a);
    if (z_lo >= context.z_min && z_hi <= context.z_max) {
      verdict.safe = true;
    } else {
      verdict.reasons.emplace_back("outside envelope");
    }
  }

  // Feasibility delegates to the recovery solver: with p_target = 1 the plan
  // reports the maximum achievable probability over all horizons <= k_max.
  const RecoveryPlan plan =
      solve_opr_ol(model, belief, strip, bounds, k_max, 1.0);
  verdict.achievable_probability = plan.predicted_probability;
  if (verdict.achievable_probability >= p_min) {
    verdict.feasible = true;
  } else {
    std::ostringstream reason;
    reason << "infeasible: achievable probability "
           << verdict.achievable_probability << " below " << p_min;
    verdict.reasons.push_back(reason.str());
  }
  return verdict;
}

std::string planner_request_json(const PlannerInput& input) {
  ordered_json req;
  req["belief"]["mean"] = vec_to_json(input.belief.mean);
  ordered_json cov_rows = ordered_json::array();
  for (Eigen::Index i = 0; i < input.belief.cov.rows(); ++i) {
    cov_rows.push_back(vec_to_json(input.belief.cov.row(i)));
  }
  req["belief"]["cov"] = cov_rows;
  req["form"] = "strip";
  req["context"]["setpoint"] = input.context.setpoint;
  req["context"]["z_min"] = input.context.z_min;
  req["context"]["z_max"] = input.context.z_max;
  req["context"]["width"] = input.context.width;
  ordered_json meas = ordered_json::array();
  for (const Vec& y : input.measurements) meas.push_back(vec_to_json(y));
  req["measurements"] = meas;
  req["alarm_step"] = input.alarm_step;
  return req.dump();
}

ExternalPlanResult external_plan_target(const PlannerInput& input,
                                        const ExternalPlannerConfig& config,
                                        const LinearModel& model,
                                        const InputBounds& bounds, int k_max,
                                        double p_min) {
  if (config.command.empty()) {
    throw ContractViolation("external planner command not configured");
  }
  ExternalPlanResult result;

  const auto fall_back = [&](const std::string& reason) {
    result.fallback_reasons.push_back(reason);
    result.theta = plan_target(input);
    result.from_external = false;
    return result;
  };

  const std::string request = planner_request_json(input) + "\n";
  const ExchangeResult exchange =
      run_line_exchange(config.command, request, config.timeout_seconds);
  if (exchange.timed_out) return fall_back("planner timeout");
  if (exchange.failed) {
    return fall_back(exchange.detail.empty() ? "planner produced no output"
                                             : exchange.detail);
  }

  RawTheta theta;
  if (!parse_theta(exchange.line, input.belief.mean.size(), &theta)) {
    return fall_back("malformed planner output");
  }

  const StripValidation validation =
      validate_params(TargetForm::kStrip, theta.theta1, theta.theta2,
                      theta.theta3);
  if (!validation.ok()) {
    for (const auto& v : validation.violations) result.fallback_reasons.push_back(v);
    result.theta = plan_target(input);
    result.from_external = false;
    return result;
  }

  const Verdict verdict = verify_target(theta, model, input.belief, bounds,
                                        k_max, p_min, input.context);
  if (!verdict.safe || !verdict.feasible) {
    for (const auto& r : verdict.reasons) result.fallback_reasons.push_back(r);
    result.theta = plan_target(input);
    result.from_external = false;
    return result;
  }

  result.theta = theta;
  result.from_external = true;
  return result;
}

}  // namespace sim
