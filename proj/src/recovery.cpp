#include "sim/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_strip_dim(const Strip& strip, int n) {
  if (strip.theta1.size() != n) {
    throw ContractViolation("strip direction dimension mismatch");
  }
}

double clamp1(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

}  // namespace

void validate_bounds(const InputBounds& bounds, int input_dim) {
  if (bounds.u_min.size() != input_dim || bounds.u_max.size() != input_dim) {
    throw ContractViolation("input bounds dimension mismatch");
  }
  if (!bounds.u_min.allFinite() || !bounds.u_max.allFinite()) {
    throw ContractViolation("input bounds must be finite");
  }
  if ((bounds.u_min.array() > bounds.u_max.array()).any()) {
    throw ContractViolation("u_min must be <= u_max componentwise");
  }
}

Vec nominal_control(const NominalController& ctrl, const GaussianBelief& b,
                    const InputBounds& bounds) {
  if (ctrl.kp <= 0.0 || ctrl.kd <= 0.0) {
    throw ContractViolation("nominal controller gains must be positive");
  }
  if (b.mean.size() != 2) {
    throw ContractViolation("nominal_control expects the 2-state model");
  }
  validate_bounds(bounds, 1);
  Vec u(1);
  u(0) = -ctrl.kp * (b.mean(0) - ctrl.setpoint) - ctrl.kd * b.mean(1);
  return bounds.clamp(u);
}

Vec box_ls_solve(const Mat& H, const Vec& g, const Vec& lo, const Vec& hi,
                 double tol, int max_iter) {
  const auto k = H.rows();
  if (H.cols() != k || g.size() != k || lo.size() != k || hi.size() != k) {
    throw ContractViolation("box_ls_solve: dimension mismatch");
  }
  if ((lo.array() > hi.array()).any()) {
    throw ContractViolation("box_ls_solve: empty box");
  }
  const auto proj = [&](const Vec& v) -> Vec {
    return v.cwiseMax(lo).cwiseMin(hi);
  };

  // Largest eigenvalue by power iteration; for a symmetric matrix this
  // converges to the dominant |eigenvalue|, so a negative Rayleigh quotient
  // exposes indefiniteness immediately.
  Vec v = Vec::Ones(k);
  for (Eigen::Index i = 0; i < k; ++i) v(i) += 1e-3 * static_cast<double>(i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec w = H * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      lambda = 0.0;
      break;
    }
    v = w / norm;
    const double rayleigh = v.dot(H * v);
    if (it > 2 && std::abs(rayleigh - lambda) <=
                      1e-12 * std::max(1.0, std::abs(rayleigh))) {
      lambda = rayleigh;
      break;
    }
    lambda = rayleigh;
  }
  if (lambda < 0.0) {
    std::ostringstream msg;
    msg << "box_ls_solve: H is not PSD (dominant curvature " << lambda << ")";
    throw NumericError(msg.str());
  }
  if (lambda == 0.0) {
    // H vanishes; minimize the linear term over the box.
    Vec u(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      u(i) = g(i) > 0.0 ? lo(i) : (g(i) < 0.0 ? hi(i) : clamp1(0.0, lo(i), hi(i)));
    }
    return u;
  }

  const double step = 1.0 / lambda;
  Vec u = proj(Vec::Zero(k));
  for (int it = 0; it < max_iter; ++it) {
    const Vec grad = H * u + g;
    const double gsq = grad.squaredNorm();
    if (gsq > 0.0) {
      const double curvature = grad.dot(H * grad);
      if (curvature < -1e-12 * gsq * std::max(1.0, lambda)) {
        std::ostringstream msg;
        msg << "box_ls_solve: negative curvature along iterate direction ("
            << curvature / gsq << ")";
        throw NumericError(msg.str());
      }
    }
    const Vec next = proj(u - step * grad);
    const double residual = lambda * (u - next).norm();
    u = next;
    if (residual <= tol) break;
  }
  return u;
}

namespace detail {

Rank1Root rank1_box_root(const std::vector<double>& w,
                         const std::vector<double>& lo,
                         const std::vector<double>& hi, double delta,
                         double rho) {
  if (w.size() != lo.size() || w.size() != hi.size()) {
    throw ContractViolation("rank1_box_root: dimension mismatch");
  }
  if (rho <= 0.0) throw ContractViolation("rank1_box_root: rho must be > 0");
  const std::size_t count = w.size();

  double wsq = 0.0, g_min = 0.0, g_max = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double wj = w[j];
    wsq += wj * wj;
    if (wj > 0.0) {
      g_min += wj * lo[j];
      g_max += wj * hi[j];
    } else if (wj < 0.0) {
      g_min += wj * hi[j];
      g_max += wj * lo[j];
    }
  }
  if (wsq == 0.0) {
    return {delta / rho, 0.0};
  }

  const auto g_of = [&](double t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      if (w[j] != 0.0) acc += w[j] * clamp1(t * w[j], lo[j], hi[j]);
    }
    return acc;
  };

  // Interior candidate: no clamp active.
  const double t_int = delta / (rho + wsq);
  bool interior = true;
  for (std::size_t j = 0; j < count; ++j) {
    const double uj = t_int * w[j];
    if (uj < lo[j] || uj > hi[j]) {
      interior = false;
      break;
    }
  }
  if (interior) {
    return {t_int, t_int * wsq};
  }

  // h(t) = rho t + g(t) is strictly increasing with the root bracketed by the
  // saturation values of g.
  double t_lo = (delta - g_max) / rho;
  double t_hi = (delta - g_min) / rho;
  const double scale = std::max({1.0, std::abs(delta), std::abs(g_min),
                                 std::abs(g_max)});
  for (int it = 0; it < 200; ++it) {
    const double t_mid = 0.5 * (t_lo + t_hi);
    if (rho * t_mid + g_of(t_mid) < delta) {
      t_lo = t_mid;
    } else {
      t_hi = t_mid;
    }
    if (wsq * (t_hi - t_lo) <= 1e-13 * scale) break;
  }
  const double t = 0.5 * (t_lo + t_hi);
  return {t, g_of(t)};
}

}  // namespace detail

namespace {

// Incremental state of the open-loop horizon scan. Coefficients are stored as
// w[i*m + c] = (theta1ᵀ A^i B)(c); the per-coordinate bounds repeat the input
// box each step, so the optimizer result is independent of coefficient order
// and only the mapping back to controls needs the time reversal.
struct HorizonScan {
  std::vector<double> w, lo, hi;
  double wsq = 0.0, g_min = 0.0, g_max = 0.0;
  double bp_hi = -kInf, bp_lo = kInf;  // outermost clamp breakpoints
  std::vector<double> ch_min, ch_max;  // per-channel coefficient range

  explicit HorizonScan(int m)
      : ch_min(static_cast<std::size_t>(m), kInf),
        ch_max(static_cast<std::size_t>(m), -kInf) {}

  void push(const Eigen::RowVectorXd& d, const InputBounds& bounds) {
    for (Eigen::Index c = 0; c < d.size(); ++c) {
      const double wc = d(c);
      const double lo_c = bounds.u_min(c);
      const double hi_c = bounds.u_max(c);
      w.push_back(wc);
      lo.push_back(lo_c);
      hi.push_back(hi_c);
      wsq += wc * wc;
      const auto cc = static_cast<std::size_t>(c);
      ch_min[cc] = std::min(ch_min[cc], wc);
      ch_max[cc] = std::max(ch_max[cc], wc);
      if (wc > 0.0) {
        g_min += wc * lo_c;
        g_max += wc * hi_c;
        bp_hi = std::max(bp_hi, hi_c / wc);
        bp_lo = std::min(bp_lo, lo_c / wc);
      } else if (wc < 0.0) {
        g_min += wc * hi_c;
        g_max += wc * lo_c;
        bp_hi = std::max(bp_hi, lo_c / wc);
        bp_lo = std::min(bp_lo, hi_c / wc);
      }
    }
  }

  // Achieved wᵀu of the regularized box problem at the current horizon.
  // O(m) fast paths cover the interior and fully saturated regimes; only the
  // narrow transition band falls back to the bisection.
  double inner(double delta, double rho, const InputBounds& bounds) const {
    if (wsq == 0.0) return 0.0;
    const double t_int = delta / (rho + wsq);
    bool interior = true;
    for (std::size_t c = 0; c < ch_min.size(); ++c) {
      const double a = t_int * ch_min[c];
      const double b = t_int * ch_max[c];
      if (std::min(a, b) < bounds.u_min(static_cast<Eigen::Index>(c)) ||
          std::max(a, b) > bounds.u_max(static_cast<Eigen::Index>(c))) {
        interior = false;
        break;
      }
    }
    if (interior) return t_int * wsq;
    if ((delta - g_max) / rho >= bp_hi) return g_max;
    if ((delta - g_min) / rho <= bp_lo) return g_min;
    return detail::rank1_box_root(w, lo, hi, delta, rho).inner;
  }
};

}  // namespace

RecoveryPlan solve_opr_ol(const LinearModel& model, const GaussianBelief& b0,
                          const Strip& strip, const InputBounds& bounds,
                          int k_max, double p_target) {
  const int n = model.state_dim();
  const int m = model.input_dim();
  if (k_max < 1) {
    throw ContractViolation("solve_opr_ol: no valid horizon (k_max < 1)");
  }
  if (p_target < 0.0 || p_target > 1.0) {
    throw ContractViolation("solve_opr_ol: p_target must be in [0, 1]");
  }
  check_strip_dim(strip, n);
  validate_bounds(bounds, m);
  if (b0.mean.size() != n || b0.cov.rows() != n || b0.cov.cols() != n) {
    throw ContractViolation("solve_opr_ol: belief dimension mismatch");
  }

  const double center = 0.5 * (strip.theta2 + strip.theta3);
  const double rho = kOprRegularizer;

  HorizonScan scan(m);
  Mat aib = model.B();  // A^{k-1} B while scanning horizon k
  Vec phi = b0.mean;    // A^k mu0 after the per-k update
  Mat sigma = b0.cov;

  bool met = false;
  int met_k = 0;
  double best_p = -1.0;
  int best_k = 1;

  for (int k = 1; k <= k_max; ++k) {
    const Eigen::RowVectorXd d = strip.theta1.transpose() * aib;
    scan.push(d, bounds);
    aib = model.A() * aib;
    phi = model.A() * phi;
    Mat propagated = model.A() * sigma * model.A().transpose() + model.Q();
    sigma = 0.5 * (propagated + propagated.transpose());

    const double proj_mean = strip.theta1.dot(phi);
    const double sd =
        std::sqrt(std::max(0.0, strip.theta1.dot(sigma * strip.theta1)));
    const double inner = scan.inner(center - proj_mean, rho, bounds);
    const double p =
        band_probability(proj_mean + inner, sd, strip.theta2, strip.theta3);

    if (!met && p >= p_target) {
      met = true;
      met_k = k;
    }
    if (p > best_p + 1e-12) {  // ties resolve to the smallest horizon
      best_p = p;
      best_k = k;
    }
  }

  const int horizon = met ? met_k : best_k;

  // Re-solve the selected horizon exactly and map the per-coefficient
  // solution back to time order: u_j uses coefficient index (horizon-1-j).
  const std::size_t km = static_cast<std::size_t>(horizon) * m;
  const std::vector<double> w_sel(scan.w.begin(), scan.w.begin() + km);
  const std::vector<double> lo_sel(scan.lo.begin(), scan.lo.begin() + km);
  const std::vector<double> hi_sel(scan.hi.begin(), scan.hi.begin() + km);

  Vec phi_sel = b0.mean;
  for (int k = 0; k < horizon; ++k) phi_sel = model.A() * phi_sel;
  const double delta_sel = center - strip.theta1.dot(phi_sel);
  const auto root =
      detail::rank1_box_root(w_sel, lo_sel, hi_sel, delta_sel, rho);

  RecoveryPlan plan;
  plan.horizon = horizon;
  plan.strip = strip;
  plan.status =
      met ? PlanStatus::kMetTargetProbability : PlanStatus::kBestEffort;
  plan.controls.reserve(static_cast<std::size_t>(horizon));
  for (int j = 0; j < horizon; ++j) {
    Vec u(m);
    for (int c = 0; c < m; ++c) {
      const std::size_t idx =
          static_cast<std::size_t>(horizon - 1 - j) * m + c;
      u(c) = w_sel[idx] == 0.0
                 ? clamp1(0.0, lo_sel[idx], hi_sel[idx])
                 : clamp1(root.t * w_sel[idx], lo_sel[idx], hi_sel[idx]);
    }
    plan.controls.push_back(bounds.clamp(u));
  }

  GaussianBelief final_belief = b0;
  for (const Vec& u : plan.controls) {
    final_belief = predict_belief(model, final_belief, u);
  }
  plan.predicted_final_belief = final_belief;
  plan.predicted_probability = strip_probability(strip, final_belief);
  return plan;
}

std::pair<Vec, GaussianBelief> opr_pcl_step(
    const LinearModel& model, const GaussianBelief& b, const Strip& strip,
    const InputBounds& bounds, const std::vector<int>& trusted, const Vec& y,
    int remaining, double p_target) {
  if (remaining < 1) {
    throw ContractViolation("opr_pcl_step: remaining must be >= 1");
  }
  const GaussianBelief updated = kalman_update(model, b, y, trusted);
  const RecoveryPlan plan =
      solve_opr_ol(model, updated, strip, bounds, remaining, p_target);
  const Vec u = plan.controls.front();
  return {u, predict_belief(model, updated, u)};
}

RecoveryPlan solve_rtr_lqr(const LinearModel& model, const GaussianBelief& b,
                           const Strip& strip, int horizon, const Mat& Qc,
                           const Mat& Rc, const InputBounds& bounds) {
  const int n = model.state_dim();
  const int m = model.input_dim();
  if (horizon < 1) throw ContractViolation("solve_rtr_lqr: horizon must be >= 1");
  check_strip_dim(strip, n);
  validate_bounds(bounds, m);
  if (Qc.rows() != n || Qc.cols() != n || Rc.rows() != m || Rc.cols() != m) {
    throw ContractViolation("solve_rtr_lqr: cost dimension mismatch");
  }
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(Rc);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw NumericError("solve_rtr_lqr: R_c is singular");
    }
  }

  // Target: strip center along theta1 with zero velocity in the remaining
  // coordinates.
  const double center = 0.5 * (strip.theta2 + strip.theta3);
  const Vec x_star = (center / strip.theta1.squaredNorm()) * strip.theta1;

  // Finite-horizon Riccati recursion for time-varying gains.
  std::vector<Mat> gains(static_cast<std::size_t>(horizon));
  Mat p = Qc;
  for (int t = horizon - 1; t >= 0; --t) {
    const Mat btp = model.B().transpose() * p;
    const Mat s = Rc + btp * model.B();
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw NumericError("solve_rtr_lqr: singular gain system");
    }
    gains[static_cast<std::size_t>(t)] = s.ldlt().solve(btp * model.A());
    Mat next = Qc + model.A().transpose() * p * model.A() -
               model.A().transpose() * p * model.B() *
                   gains[static_cast<std::size_t>(t)];
    p = 0.5 * (next + next.transpose());
  }

  RecoveryPlan plan;
  plan.horizon = horizon;
  plan.strip = strip;
  plan.status = PlanStatus::kBestEffort;
  plan.controls.reserve(static_cast<std::size_t>(horizon));
  GaussianBelief belief = b;
  for (int t = 0; t < horizon; ++t) {
    const Vec u = bounds.clamp(
        -gains[static_cast<std::size_t>(t)] * (belief.mean - x_star));
    plan.controls.push_back(u);
    belief = predict_belief(model, belief, u);
  }
  plan.predicted_final_belief = belief;
  plan.predicted_probability = strip_probability(strip, belief);
  return plan;
}

std::pair<Vec, GaussianBelief> virtual_sensor_control(
    const LinearModel& model, const GaussianBelief& b,
    const NominalController& ctrl, const InputBounds& bounds) {
  const Vec u = nominal_control(ctrl, b, bounds);
  return {u, predict_belief(model, b, u)};
}

}  // namespace sim
