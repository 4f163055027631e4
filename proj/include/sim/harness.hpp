#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sim/config.hpp"
#include "sim/detector.hpp"
#include "sim/dynamics.hpp"
#include "sim/target_set.hpp"

namespace sim {

enum class ControllerKind { kOprOl, kOprPcl, kRtrLqr, kVirtualSensor };

ControllerKind controller_from_name(const std::string& name);
std::string controller_name(ControllerKind kind);

// One episode's outcome as persisted to the results CSV.
struct RunRecord {
  std::uint64_t seed = 0;
  double sigma = 1.0;  // gps-noise multiplier
  std::string controller;
  int attack_step = 0;
  std::optional<int> alarm_step;
  int recovery_steps = 0;
  double final_distance = 0.0;
  bool success = false;
  std::vector<std::string> reasons;
};

// Full episode output. The trajectory's last row holds the terminal state the
// record was evaluated against; anchor fields expose the rollback belief for
// calibration studies.
struct EpisodeResult {
  RunRecord record;
  Trajectory trajectory;
  std::optional<Strip> strip;
  std::optional<int> anchor_step;
  std::optional<GaussianBelief> anchor_belief;
};

// Runs the nominal -> attacked -> detected -> plan+verify -> recover state
// machine. Deterministic given (config, controller, seed, sigma_multiplier);
// hard failures yield a failed record, never an exception.
EpisodeResult run_episode(const ExperimentConfig& config, ControllerKind kind,
                          std::uint64_t seed, double sigma_multiplier = 1.0);

// Per-(sigma, controller) aggregate of a sweep.
struct Aggregate {
  double sigma = 1.0;
  std::string controller;
  int episodes = 0;
  double success_rate = 0.0;
  double mean_distance = 0.0;
};

struct SweepResult {
  std::vector<RunRecord> records;   // sorted by (sigma, controller, seed)
  std::vector<Aggregate> aggregates;
};

// Runs every (sigma multiplier, controller, seed) episode of the config.
// Failed episodes count as non-success and never abort the sweep.
SweepResult sweep(const ExperimentConfig& config);

// Aggregation used by sweep(); exposed so results can be re-aggregated from a
// CSV. Record order does not affect the output.
std::vector<Aggregate> aggregate_records(std::vector<RunRecord> records);

// Numerically stable mean via pairwise summation.
double pairwise_mean(const std::vector<double>& values);

}  // namespace sim
