#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sim/dynamics.hpp"

namespace sim {

// Target set forms. Only the strip is implemented; the tag exists so new
// forms (boxes, polytopes) can slot in without touching callers.
enum class TargetForm { kStrip };

// Region between two parallel hyperplanes:
//   T(theta) = { x | theta2 <= theta1ᵀ x <= theta3 }.
struct Strip {
  Vec theta1;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

// Outcome of validating a raw parameter bundle. Every violated constraint is
// reported by name; `strip` is set iff there were no violations.
struct StripValidation {
  std::optional<Strip> strip;
  std::vector<std::string> violations;
  bool ok() const { return strip.has_value(); }
};

StripValidation validate_params(TargetForm form, const Vec& theta1,
                                double theta2, double theta3);

// Closed-inequality membership test.
bool contains(const Strip& s, const State& x);

// |theta1ᵀ x - (theta2 + theta3)/2| / ‖theta1‖, i.e. distance in state units
// from the strip's center hyperplane.
double distance_to_center(const Strip& s, const State& x);

// Probability that a state drawn from the belief lands inside the strip.
// Degenerate zero-variance projections use indicator semantics.
double strip_probability(const Strip& s, const GaussianBelief& b);

// Standard normal CDF.
double normal_cdf(double z);

// Probability mass of [lo_offset, hi_offset] around mean m for the scalar
// projection theta1ᵀx with standard deviation sd; shared by the strip and the
// recovery solver so both report identical numbers.
double band_probability(double m, double sd, double lo, double hi);

}  // namespace sim
