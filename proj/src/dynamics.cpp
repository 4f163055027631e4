#include "sim/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace sim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

bool is_symmetric(const Mat& m, double tol) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

// Symmetric PSD square root via eigendecomposition; tolerates eigenvalues
// down to -tol which are clamped to zero.
Mat psd_sqrt(const Mat& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Vec lam = es.eigenvalues();
  if (lam.minCoeff() < -tol) {
    std::ostringstream msg;
    msg << "matrix is not PSD (min eigenvalue " << lam.minCoeff() << ")";
    throw NumericError(msg.str());
  }
  Vec sq = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

LinearModel::LinearModel(Mat A, Mat B, Mat C, Mat Q, Mat R, double dt,
                         std::vector<std::string> sensor_labels)
    : a_(std::move(A)),
      b_(std::move(B)),
      c_(std::move(C)),
      q_(std::move(Q)),
      r_(std::move(R)),
      dt_(dt),
      labels_(std::move(sensor_labels)) {
  const auto n = a_.rows();
  const auto p = c_.rows();
  require(n >= 1 && a_.cols() == n, "A must be square");
  require(b_.rows() == n && b_.cols() >= 1, "B must have n rows");
  require(p >= 1 && c_.cols() == n, "C must have n columns");
  require(q_.rows() == n && q_.cols() == n, "Q must be n x n");
  require(r_.rows() == p && r_.cols() == p, "R must be p x p");
  require(dt_ > 0.0, "dt must be positive");
  require(labels_.size() == static_cast<std::size_t>(p),
          "one sensor label per output");
  require(is_symmetric(q_, 1e-12 * std::max(1.0, q_.cwiseAbs().maxCoeff())),
          "Q must be symmetric");
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j) {
        require(r_(i, i) >= 0.0, "R diagonal entries must be nonnegative");
      } else {
        require(r_(i, j) == 0.0, "R must be diagonal");
      }
    }
  }
  require(a_.allFinite() && b_.allFinite() && c_.allFinite() &&
              q_.allFinite() && r_.allFinite(),
          "model matrices must be finite");
  process_noise_sqrt_ = psd_sqrt(q_, 1e-9);  // also validates Q PSD
}

Vec LinearModel::sample_process_noise(RandomSource& rng) const {
  Vec z(state_dim());
  for (int i = 0; i < state_dim(); ++i) z(i) = rng.gaussian();
  return process_noise_sqrt_ * z;
}

Vec LinearModel::sample_measurement_noise(RandomSource& rng) const {
  Vec v(output_dim());
  for (int i = 0; i < output_dim(); ++i)
    v(i) = std::sqrt(r_(i, i)) * rng.gaussian();
  return v;
}

Mat make_psd(const Mat& cov, double tol) {
  Mat sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig >= 0.0) return sym;
  if (min_eig < -tol) {
    std::ostringstream msg;
    msg << "covariance lost positive semidefiniteness (min eigenvalue "
        << min_eig << ")";
    throw NumericError(msg.str());
  }
  Vec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

State step_truth(const LinearModel& model, const State& x, const Vec& u,
                 const Vec& w) {
  if (x.size() != model.state_dim() || u.size() != model.input_dim() ||
      w.size() != model.state_dim()) {
    throw ContractViolation("step_truth: dimension mismatch");
  }
  return model.A() * x + model.B() * u + w;
}

GaussianBelief predict_belief(const LinearModel& model, const GaussianBelief& b,
                              const Vec& u) {
  if (b.mean.size() != model.state_dim() || u.size() != model.input_dim() ||
      b.cov.rows() != model.state_dim() || b.cov.cols() != model.state_dim()) {
    throw ContractViolation("predict_belief: dimension mismatch");
  }
  GaussianBelief out;
  out.mean = model.A() * b.mean + model.B() * u;
  Mat cov = model.A() * b.cov * model.A().transpose() + model.Q();
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

GaussianBelief kalman_update(const LinearModel& model, const GaussianBelief& b,
                             const Vec& y, const std::vector<int>& trusted) {
  const int n = model.state_dim();
  const int p = model.output_dim();
  if (trusted.empty()) {
    throw ContractViolation("kalman_update: trusted sensor set is empty");
  }
  if (b.mean.size() != n || b.cov.rows() != n || b.cov.cols() != n ||
      y.size() != p) {
    throw ContractViolation("kalman_update: dimension mismatch");
  }
  for (int s : trusted) {
    if (s < 0 || s >= p) {
      throw ContractViolation("kalman_update: trusted index out of range");
    }
  }

  const auto t = static_cast<Eigen::Index>(trusted.size());
  Mat ct(t, n);
  Vec yt(t);
  Mat rt = Mat::Zero(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    ct.row(i) = model.C().row(trusted[static_cast<std::size_t>(i)]);
    yt(i) = y(trusted[static_cast<std::size_t>(i)]);
    rt(i, i) = model.R()(trusted[static_cast<std::size_t>(i)],
                         trusted[static_cast<std::size_t>(i)]);
  }

  const Mat s = ct * b.cov * ct.transpose() + rt;
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const double max_eig = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, max_eig)) {
    std::ostringstream msg;
    msg << "kalman_update: singular innovation covariance (eigenvalues "
        << es.eigenvalues().transpose() << ")";
    throw NumericError(msg.str());
  }

  const Mat ph = b.cov * ct.transpose();
  const Mat gain = s.ldlt().solve(ph.transpose()).transpose();

  GaussianBelief out;
  out.mean = b.mean + gain * (yt - ct * b.mean);
  // Joseph form keeps the covariance PSD under roundoff.
  const Mat ikh = Mat::Identity(n, n) - gain * ct;
  out.cov = make_psd(ikh * b.cov * ikh.transpose() +
                     gain * rt * gain.transpose());
  return out;
}

LinearModel build_default_drone_model(double dt, double sigma_gps,
                                      double sigma_vel, double q_pos,
                                      double q_vel) {
  if (dt <= 0.0) throw ContractViolation("dt must be positive");
  Mat a(2, 2);
  a << 1.0, dt, 0.0, 1.0;
  Mat b(2, 1);
  b << 0.5 * dt * dt, dt;
  Mat c = Mat::Identity(2, 2);
  Mat q = Vec{{q_pos, q_vel}}.asDiagonal();
  Mat r = Vec{{sigma_gps * sigma_gps, sigma_vel * sigma_vel}}.asDiagonal();
  return LinearModel(a, b, c, q, r, dt, {"gps_alt", "velocity"});
}

}  // namespace sim
