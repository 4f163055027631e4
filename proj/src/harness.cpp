#include "sim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "sim/recovery.hpp"
#include "sim/rng.hpp"
#include "sim/sensing.hpp"

namespace sim {

ControllerKind controller_from_name(const std::string& name) {
  if (name == "opr-ol") return ControllerKind::kOprOl;
  if (name == "opr-pcl") return ControllerKind::kOprPcl;
  if (name == "rtr-lqr") return ControllerKind::kRtrLqr;
  if (name == "vs") return ControllerKind::kVirtualSensor;
  throw ContractViolation("unknown controller: " + name);
}

std::string controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kOprOl: return "opr-ol";
    case ControllerKind::kOprPcl: return "opr-pcl";
    case ControllerKind::kRtrLqr: return "rtr-lqr";
    case ControllerKind::kVirtualSensor: return "vs";
  }
  throw ContractViolation("unknown controller kind");
}

namespace {

// The altitude sensor the detector watches and recovery distrusts.
constexpr int kMonitoredSensor = 0;

std::vector<int> all_sensors(const LinearModel& model) {
  std::vector<int> idx(static_cast<std::size_t>(model.output_dim()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

std::vector<int> trusted_sensors(const LinearModel& model) {
  std::vector<int> idx;
  for (int i = 0; i < model.output_dim(); ++i) {
    if (i != kMonitoredSensor) idx.push_back(i);
  }
  return idx;
}

// Rule-based band used to evaluate episodes that never planned (no alarm) or
// whose plan was rejected.
std::optional<Strip> evaluation_band(const ExperimentConfig& config) {
  PlannerInput input;
  input.belief.mean = config.initial_state;
  input.belief.cov = Mat::Zero(2, 2);
  input.context = config.context;
  try {
    const RawTheta theta = plan_target(input);
    const auto validation = validate_params(TargetForm::kStrip, theta.theta1,
                                            theta.theta2, theta.theta3);
    if (validation.ok()) return *validation.strip;
  } catch (const PlannerError&) {
  }
  return std::nullopt;
}

struct RecoveryRuntime {
  Strip strip;
  RecoveryPlan plan;            // initial plan (OPR / LQR)
  GaussianBelief belief;        // rolling belief (PCL / VS)
  int steps_done = 0;
  bool open_ended = false;      // VS has no completion step
};

}  // namespace

EpisodeResult run_episode(const ExperimentConfig& config, ControllerKind kind,
                          std::uint64_t seed, double sigma_multiplier) {
  config.validate();
  if (sigma_multiplier < 0.0) {
    throw ContractViolation("sigma multiplier must be >= 0");
  }

  const LinearModel model = config.make_model(sigma_multiplier);
  const InputBounds bounds = config.bounds();
  const NominalController nominal{config.nominal.kp, config.nominal.kd,
                                  config.context.setpoint};
  const int horizon_total = config.episode.length;

  RandomSource rng(derive_seed(config.sweep.base_seed, seed));
  CusumDetector detector(config.detector_drift(sigma_multiplier),
                         config.detector_threshold(sigma_multiplier));
  BeliefBuffer buffer(static_cast<std::size_t>(config.detector.rollback_window) + 256);

  EpisodeResult result;
  result.record.seed = seed;
  result.record.sigma = sigma_multiplier;
  result.record.controller = controller_name(kind);
  result.record.attack_step = config.attack.start_step;

  State x = config.initial_state;
  // C = I for the drone model; the Q term keeps the prior nonsingular even
  // when a sensor is configured noise-free.
  GaussianBelief prior{x, Mat(model.R() + model.Q())};
  GaussianBelief posterior = prior;

  std::vector<Vec> applied_controls;
  applied_controls.reserve(static_cast<std::size_t>(horizon_total));
  std::deque<Vec> recent_measurements;

  std::optional<RecoveryRuntime> recovery;
  std::optional<int> end_step;  // first step index not simulated
  bool hard_failed = false;

  for (int t = 0; t < horizon_total; ++t) {
    const Vec y_raw = measure(model, x, rng);
    const Vec y_att = apply_attack(config.attack, t, y_raw);
    recent_measurements.push_back(y_att);
    while (recent_measurements.size() >
           static_cast<std::size_t>(config.planner.measurement_history)) {
      recent_measurements.pop_front();
    }

    if (!recovery && !hard_failed) {
      const double r = residual(model, prior, y_att, kMonitoredSensor);
      detector.step(r, t);
      if (detector.alarm_step()) {
        result.record.alarm_step = detector.alarm_step();
        // Roll back to a pre-attack belief and replay the applied controls
        // forward so recovery plans from trustworthy state knowledge.
        try {
          auto [anchor_step, anchor] = rollback_anchor(
              buffer, t, config.detector.rollback_window);
          result.anchor_step = anchor_step;
          result.anchor_belief = anchor;
          GaussianBelief rolled = anchor;
          for (int s = anchor_step; s < t; ++s) {
            rolled = predict_belief(
                model, rolled, applied_controls[static_cast<std::size_t>(s)]);
          }

          PlannerInput input;
          input.belief = rolled;
          input.measurements.assign(recent_measurements.begin(),
                                    recent_measurements.end());
          input.alarm_step = t;
          input.context = config.context;

          RawTheta theta;
          if (!config.planner.external_command.empty()) {
            ExternalPlannerConfig ext{config.planner.external_command,
                                      config.planner.timeout_seconds};
            const ExternalPlanResult ext_result = external_plan_target(
                input, ext, model, bounds, config.verifier.k_max,
                config.verifier.p_min);
            theta = ext_result.theta;
            for (const auto& reason : ext_result.fallback_reasons) {
              result.record.reasons.push_back("planner fallback: " + reason);
            }
          } else {
            theta = plan_target(input);
          }

          // Pipeline assertion: no target reaches a recovery controller
          // without passing validation and verification.
          const auto validation = validate_params(
              TargetForm::kStrip, theta.theta1, theta.theta2, theta.theta3);
          if (!validation.ok()) {
            hard_failed = true;
            for (const auto& v : validation.violations) {
              result.record.reasons.push_back("failed: " + v);
            }
            end_step = t;
          } else {
            const Verdict verdict = verify_target(
                theta, model, rolled, bounds, config.verifier.k_max,
                config.verifier.p_min, config.context);
            if (!verdict.safe || !verdict.feasible) {
              hard_failed = true;
              result.record.reasons.emplace_back("failed: target rejected");
              for (const auto& reason : verdict.reasons) {
                result.record.reasons.push_back("failed: " + reason);
              }
              end_step = t;
            } else {
              RecoveryRuntime rt;
              rt.strip = *validation.strip;
              rt.belief = rolled;
              switch (kind) {
                case ControllerKind::kOprOl:
                case ControllerKind::kOprPcl:
                  rt.plan = solve_opr_ol(model, rolled, rt.strip, bounds,
                                         config.recovery.k_max,
                                         config.recovery.p_target);
                  break;
                case ControllerKind::kRtrLqr: {
                  Mat qc = Vec{{config.recovery.lqr_pos_cost,
                                config.recovery.lqr_vel_cost}}
                               .asDiagonal();
                  Mat rc = Mat::Constant(1, 1, config.recovery.lqr_input_cost);
                  rt.plan = solve_rtr_lqr(model, rolled, rt.strip,
                                          config.recovery.lqr_horizon, qc, rc,
                                          bounds);
                  break;
                }
                case ControllerKind::kVirtualSensor:
                  rt.open_ended = true;
                  break;
              }
              recovery = std::move(rt);
              result.strip = recovery->strip;
            }
          }
        } catch (const EpisodeError& e) {
          hard_failed = true;
          result.record.reasons.push_back(std::string("failed: ") + e.what());
          end_step = t;
        }
      } else {
        posterior = kalman_update(model, prior, y_att, all_sensors(model));
        buffer.push(t, posterior);
      }
    }
    if (end_step) break;

    Vec u;
    Mode mode;
    if (!recovery) {
      mode = (config.attack.kind != AttackKind::kNone &&
              t >= config.attack.start_step)
                 ? Mode::kAttackedUndetected
                 : Mode::kNominal;
      u = nominal_control(nominal, posterior, bounds);
    } else {
      mode = Mode::kRecovery;
      RecoveryRuntime& rt = *recovery;
      switch (kind) {
        case ControllerKind::kOprOl:
          u = rt.plan.controls[static_cast<std::size_t>(rt.steps_done)];
          break;
        case ControllerKind::kOprPcl: {
          const int remaining = rt.plan.horizon - rt.steps_done;
          auto [u_pcl, belief_next] = opr_pcl_step(
              model, rt.belief, rt.strip, bounds, trusted_sensors(model),
              y_att, remaining, config.recovery.p_target);
          u = u_pcl;
          rt.belief = belief_next;
          break;
        }
        case ControllerKind::kRtrLqr:
          u = rt.plan.controls[static_cast<std::size_t>(rt.steps_done)];
          break;
        case ControllerKind::kVirtualSensor: {
          auto [u_vs, belief_next] =
              virtual_sensor_control(model, rt.belief, nominal, bounds);
          u = u_vs;
          rt.belief = belief_next;
          break;
        }
      }
      rt.steps_done += 1;
    }

    result.trajectory.steps.push_back(
        {t, x, u, y_raw, y_att, mode});
    applied_controls.push_back(u);

    const Vec w = model.sample_process_noise(rng);
    x = step_truth(model, x, u, w);
    if (!recovery) {
      prior = predict_belief(model, posterior, u);
    }

    if (recovery && !recovery->open_ended &&
        recovery->steps_done >= recovery->plan.horizon) {
      end_step = t + 1;
      break;
    }
  }

  // Terminal row: the state the episode is evaluated at, with a noise-free
  // closing readout so no extra random draws are consumed.
  const int final_step = end_step.value_or(horizon_total);
  Mode final_mode = Mode::kNominal;
  if (!result.trajectory.steps.empty()) {
    final_mode = result.trajectory.steps.back().mode;
  }
  const Vec closing = model.C() * x;
  result.trajectory.steps.push_back(
      {final_step, x, Vec::Zero(model.input_dim()), closing, closing,
       final_mode});

  if (result.record.alarm_step) {
    result.record.recovery_steps = final_step - *result.record.alarm_step;
  }
  if (!result.strip) {
    result.strip = evaluation_band(config);
  }
  if (result.strip) {
    result.record.final_distance = distance_to_center(*result.strip, x);
    result.record.success = !hard_failed && contains(*result.strip, x);
  } else {
    result.record.final_distance = std::numeric_limits<double>::quiet_NaN();
    result.record.success = false;
  }
  return result;
}

double pairwise_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  struct Summer {
    static double sum(const double* data, std::size_t count) {
      if (count <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) acc += data[i];
        return acc;
      }
      const std::size_t half = count / 2;
      return sum(data, half) + sum(data + half, count - half);
    }
  };
  return Summer::sum(values.data(), values.size()) /
         static_cast<double>(values.size());
}

std::vector<Aggregate> aggregate_records(std::vector<RunRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              if (a.sigma != b.sigma) return a.sigma < b.sigma;
              if (a.controller != b.controller) return a.controller < b.controller;
              return a.seed < b.seed;
            });
  std::vector<Aggregate> aggregates;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    int successes = 0;
    std::vector<double> distances;
    while (j < records.size() && records[j].sigma == records[i].sigma &&
           records[j].controller == records[i].controller) {
      if (records[j].success) ++successes;
      if (std::isfinite(records[j].final_distance)) {
        distances.push_back(records[j].final_distance);
      }
      ++j;
    }
    Aggregate agg;
    agg.sigma = records[i].sigma;
    agg.controller = records[i].controller;
    agg.episodes = static_cast<int>(j - i);
    agg.success_rate = static_cast<double>(successes) / static_cast<double>(j - i);
    agg.mean_distance = distances.empty()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : pairwise_mean(distances);
    aggregates.push_back(std::move(agg));
    i = j;
  }
  return aggregates;
}

SweepResult sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;
  for (double sigma : config.sweep.sigma_multipliers) {
    for (const auto& name : config.sweep.controllers) {
      const ControllerKind kind = controller_from_name(name);
      for (int s = 0; s < config.sweep.seeds; ++s) {
        result.records.push_back(
            run_episode(config, kind, static_cast<std::uint64_t>(s), sigma)
                .record);
      }
    }
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              if (a.sigma != b.sigma) return a.sigma < b.sigma;
              if (a.controller != b.controller) return a.controller < b.controller;
              return a.seed < b.seed;
            });
  result.aggregates = aggregate_records(result.records);
  return result;
}

}  // namespace sim
