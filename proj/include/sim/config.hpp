#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sim/dynamics.hpp"
#include "sim/planner.hpp"
#include "sim/recovery.hpp"
#include "sim/sensing.hpp"

namespace sim {

struct ModelConfig {
  double dt = 0.02;
  double sigma_gps = 0.1;   // m
  double sigma_vel = 0.05;  // m/s
  double q_pos = 1e-6;
  double q_vel = 1e-4;
};

struct DetectorConfig {
  double drift = 0.2;       // b, residual units
  double threshold = 30.0;  // tau
  int rollback_window = 60; // W, steps
  // Tuning follows the modeled innovation scale: the drift tracks the
  // configured gps noise so quiet sensors keep a tight drift, while the
  // threshold scales down with the noise but never above its nominal value,
  // keeping the detection delay inside the rollback window at high noise.
  bool scale_with_sigma = true;
};

struct PlannerSelection {
  std::string external_command;  // empty = built-in rule-based planner
  double timeout_seconds = 10.0;
  int measurement_history = 10;  // k most recent measurements for the planner
};

struct RecoveryConfig {
  double p_target = 0.95;
  int k_max = 500;
  double u_min = -5.0;  // m/s^2, net of gravity
  double u_max = 5.0;
  int lqr_horizon = 400;
  double lqr_pos_cost = 10.0;
  double lqr_vel_cost = 1.0;
  double lqr_input_cost = 0.1;
};

struct VerifierConfig {
  double p_min = 0.8;
  int k_max = 500;
};

struct NominalConfig {
  double kp = 2.0;
  double kd = 2.0;
};

struct SweepConfig {
  std::vector<double> sigma_multipliers = {0.5, 1.0, 2.0, 4.0, 8.0};
  int seeds = 200;
  std::uint64_t base_seed = 42;
  std::vector<std::string> controllers = {"opr-ol", "opr-pcl", "rtr-lqr", "vs"};
};

struct EpisodeConfig {
  int length = 2000;  // steps
};

struct OutputConfig {
  std::string results = "results.csv";
};

// Full experiment description. Defaults reproduce the stock scenario: a
// hovering drone, +3 m GPS bias at step 500, rule-based planner, all four
// recovery controllers.
struct ExperimentConfig {
  ModelConfig model;
  Vec initial_state = (Vec(2) << 10.0, 0.0).finished();
  AttackScenario attack{AttackKind::kBias, 0, 500, 3.0, 0.0};
  DetectorConfig detector;
  PlannerSelection planner;
  PlanningContext context;
  NominalConfig nominal;
  RecoveryConfig recovery;
  VerifierConfig verifier;
  EpisodeConfig episode;
  SweepConfig sweep;
  OutputConfig output;

  LinearModel make_model(double sigma_multiplier) const;
  InputBounds bounds() const;
  double detector_drift(double sigma_multiplier) const;
  double detector_threshold(double sigma_multiplier) const;

  // Raises ContractViolation when any invariant is violated.
  void validate() const;
};

// Parses a config JSON document over the defaults. Unknown keys are rejected
// so typos cannot silently fall back to defaults.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace sim
