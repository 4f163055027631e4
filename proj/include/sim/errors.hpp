#pragma once

#include <stdexcept>

namespace sim {

// Caller violated an operation's contract (bad dimensions, bad arguments).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure with a diagnostic (singular matrix, negative curvature).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The current episode cannot continue (e.g. rollback buffer underflow).
// The harness converts this into a failed RunRecord instead of crashing.
class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The planner could not produce a target set for the given context.
class PlannerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sim
