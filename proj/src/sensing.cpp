#include "sim/sensing.hpp"

#include <cmath>

namespace sim {

void validate_scenario(const AttackScenario& scenario,
                       const LinearModel& model) {
  if (scenario.kind == AttackKind::kNone) return;
  if (scenario.target_sensor < 0 ||
      scenario.target_sensor >= model.output_dim()) {
    throw ContractViolation("attack target sensor out of range");
  }
  if (scenario.start_step < 0) {
    throw ContractViolation("attack start step must be nonnegative");
  }
  if (!std::isfinite(scenario.magnitude) || !std::isfinite(scenario.slope)) {
    throw ContractViolation("attack magnitude/slope must be finite");
  }
}

Vec measure(const LinearModel& model, const State& x, RandomSource& rng) {
  if (x.size() != model.state_dim()) {
    throw ContractViolation("measure: dimension mismatch");
  }
  return model.C() * x + model.sample_measurement_noise(rng);
}

Vec apply_attack(const AttackScenario& scenario, int step, const Vec& y) {
  if (step < 0) throw ContractViolation("apply_attack: step must be >= 0");
  Vec out = y;
  if (scenario.kind == AttackKind::kNone || step < scenario.start_step) {
    return out;
  }
  switch (scenario.kind) {
    case AttackKind::kBias:
      out(scenario.target_sensor) += scenario.magnitude;
      break;
    case AttackKind::kRamp:
      out(scenario.target_sensor) +=
          scenario.slope * static_cast<double>(step - scenario.start_step);
      break;
    case AttackKind::kNone:
      break;
  }
  return out;
}

}  // namespace sim
