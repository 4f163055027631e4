#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sim/errors.hpp"
#include "sim/rng.hpp"

namespace sim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// State vector of the plant: for the default drone model
// [altitude m, vertical velocity m/s].
using State = Vec;

// Discrete-time linear system
//   x' = A x + B u + w,   w ~ N(0, Q)
//   y  = C x + v,         v ~ N(0, R)
// Q is the process noise covariance, R the diagonal measurement noise
// covariance, dt the step duration in seconds. Construction validates all
// dimension and definiteness invariants and fails loudly otherwise.
class LinearModel {
 public:
  LinearModel(Mat A, Mat B, Mat C, Mat Q, Mat R, double dt,
              std::vector<std::string> sensor_labels);

  int state_dim() const { return static_cast<int>(a_.rows()); }
  int input_dim() const { return static_cast<int>(b_.cols()); }
  int output_dim() const { return static_cast<int>(c_.rows()); }

  const Mat& A() const { return a_; }
  const Mat& B() const { return b_; }
  const Mat& C() const { return c_; }
  const Mat& Q() const { return q_; }
  const Mat& R() const { return r_; }
  double dt() const { return dt_; }
  const std::vector<std::string>& sensor_labels() const { return labels_; }

  // Draws w ~ N(0, Q) from rng; consumes exactly state_dim() gaussians.
  Vec sample_process_noise(RandomSource& rng) const;
  // Draws v ~ N(0, R) from rng; consumes exactly output_dim() gaussians.
  Vec sample_measurement_noise(RandomSource& rng) const;

 private:
  Mat a_, b_, c_, q_, r_;
  Mat process_noise_sqrt_;  // L with L Lᵀ = Q
  double dt_;
  std::vector<std::string> labels_;
};

// Gaussian state estimate carried through prediction and update steps.
struct GaussianBelief {
  Vec mean;
  Mat cov;
};

// Symmetrizes cov and clamps tiny negative eigenvalues to zero. Eigenvalues
// below -tol indicate a real numerical problem and raise NumericError.
Mat make_psd(const Mat& cov, double tol = 1e-9);

// Episode phase attached to every trajectory step.
enum class Mode { kNominal, kAttackedUndetected, kRecovery };

// Per-step record of one simulated episode. `measurement` is the clean sensor
// output, `attacked_measurement` what the estimator actually saw. Mode flags
// are non-decreasing in the order nominal -> attacked-undetected -> recovery.
struct Trajectory {
  struct Step {
    int step = 0;
    State state;
    Vec input;
    Vec measurement;
    Vec attacked_measurement;
    Mode mode = Mode::kNominal;
  };
  std::vector<Step> steps;
};

// x' = A x + B u + w. Pass w = 0 for deterministic stepping.
State step_truth(const LinearModel& model, const State& x, const Vec& u,
                 const Vec& w);

// Prediction-only propagation: mean' = A mean + B u, cov' = A cov Aᵀ + Q.
GaussianBelief predict_belief(const LinearModel& model, const GaussianBelief& b,
                              const Vec& u);

// Measurement update restricted to the trusted sensor rows of C and the
// matching entries of y and R (Joseph form, covariance re-clamped to PSD).
GaussianBelief kalman_update(const LinearModel& model, const GaussianBelief& b,
                             const Vec& y, const std::vector<int>& trusted);

// Desk-scale altitude double integrator: n=2, m=1, p=2 with
// A=[[1,dt],[0,1]], B=[[dt²/2],[dt]], C=I and sensors gps_alt / velocity.
LinearModel build_default_drone_model(double dt, double sigma_gps = 0.1,
                                      double sigma_vel = 0.05,
                                      double q_pos = 1e-6, double q_vel = 1e-4);

}  // namespace sim
