#pragma once

#include <utility>
#include <vector>

#include "sim/dynamics.hpp"
#include "sim/target_set.hpp"

namespace sim {

// Per-channel actuator saturation limits.
struct InputBounds {
  Vec u_min;
  Vec u_max;

  Vec clamp(const Vec& u) const {
    return u.cwiseMax(u_min).cwiseMin(u_max);
  }
};

// Checks bounds consistency against an input dimension.
void validate_bounds(const InputBounds& bounds, int input_dim);

enum class PlanStatus { kMetTargetProbability, kBestEffort };

// Bounded control sequence together with its predicted outcome. The stored
// probability always equals strip_probability of predicted_final_belief under
// `strip`, recomputed from the controls themselves.
struct RecoveryPlan {
  int horizon = 0;
  std::vector<Vec> controls;
  double predicted_probability = 0.0;
  GaussianBelief predicted_final_belief;
  Strip strip;
  PlanStatus status = PlanStatus::kBestEffort;
};

// PD mission controller on the estimated altitude state.
struct NominalController {
  double kp = 2.0;
  double kd = 2.0;
  double setpoint = 10.0;
};

// u = clamp(-kp (mu_z - setpoint) - kd mu_v). Requires the 2-state model.
Vec nominal_control(const NominalController& ctrl, const GaussianBelief& b,
                    const InputBounds& bounds);

// Projected-gradient minimizer of 1/2 uᵀHu + gᵀu over the box [lo, hi] with
// step 1/L (L from power iteration). The returned point is always inside the
// box; detected negative curvature raises NumericError.
Vec box_ls_solve(const Mat& H, const Vec& g, const Vec& lo, const Vec& hi,
                 double tol = 1e-8, int max_iter = 5000);

// Control regularizer used inside the recovery solver (uniqueness only; the
// zero-noise tolerances in the tests account for it).
inline constexpr double kOprRegularizer = 1e-6;

// Open-loop recovery: scans every horizon k = 1..k_max, places the belief
// mean as close to the strip center as the input box allows (covariance is
// control-independent), and picks the smallest k whose success probability
// reaches p_target, falling back to the argmax-probability horizon.
RecoveryPlan solve_opr_ol(const LinearModel& model, const GaussianBelief& b0,
                          const Strip& strip, const InputBounds& bounds,
                          int k_max, double p_target);

// Receding-horizon step of the partially-closed-loop variant: fold the
// trusted sensor entries of y into the belief, re-solve the open-loop plan
// for the remaining steps, and apply its first control.
std::pair<Vec, GaussianBelief> opr_pcl_step(
    const LinearModel& model, const GaussianBelief& b, const Strip& strip,
    const InputBounds& bounds, const std::vector<int>& trusted, const Vec& y,
    int remaining, double p_target);

// Baseline: finite-horizon LQR toward the strip center with zero velocity,
// rolled out open-loop on the belief mean with saturated gains.
RecoveryPlan solve_rtr_lqr(const LinearModel& model, const GaussianBelief& b,
                           const Strip& strip, int horizon, const Mat& Qc,
                           const Mat& Rc, const InputBounds& bounds);

// Baseline: keep the nominal controller running on the model-predicted
// belief instead of the (distrusted) measurements.
std::pair<Vec, GaussianBelief> virtual_sensor_control(
    const LinearModel& model, const GaussianBelief& b,
    const NominalController& ctrl, const InputBounds& bounds);

namespace detail {

// Exact minimizer of (wᵀu - delta)² + rho ‖u‖² over per-coordinate bounds.
// Stationarity gives u_j = clamp(t w_j, lo_j, hi_j) with rho t = delta - wᵀu;
// the left side is increasing in t and the right side non-increasing, so the
// root is unique. Returns t and the achieved inner product wᵀu.
struct Rank1Root {
  double t = 0.0;
  double inner = 0.0;
};

Rank1Root rank1_box_root(const std::vector<double>& w,
                         const std::vector<double>& lo,
                         const std::vector<double>& hi, double delta,
                         double rho);

}  // namespace detail

}  // namespace sim
