#pragma once

#include "sim/dynamics.hpp"

namespace sim {

enum class AttackKind { kNone, kBias, kRamp };

// Additive sensor-spoofing schedule. `bias` adds a constant offset from
// start_step on; `ramp` adds slope * (step - start_step). A positive offset
// on the altitude sensor makes the vehicle believe it is higher than it is.
struct AttackScenario {
  AttackKind kind = AttackKind::kNone;
  int target_sensor = 0;
  int start_step = 0;
  double magnitude = 0.0;  // sensor units (bias)
  double slope = 0.0;      // sensor units per step (ramp)
};

// Checks the scenario against a model (target sensor in range, finite
// parameters). kind == none ignores the other fields.
void validate_scenario(const AttackScenario& scenario, const LinearModel& model);

// y = C x + v with v ~ N(0, R); consumes output_dim() gaussians from rng so
// a fixed seed yields a fixed measurement stream.
Vec measure(const LinearModel& model, const State& x, RandomSource& rng);

// Applies the scheduled spoofing signal for `step` to a copy of y. Sensors
// other than the target are returned bit-identical.
Vec apply_attack(const AttackScenario& scenario, int step, const Vec& y);

}  // namespace sim
