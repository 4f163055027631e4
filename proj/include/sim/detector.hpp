#pragma once

#include <deque>
#include <optional>
#include <utility>

#include "sim/dynamics.hpp"

namespace sim {

// Nonparametric CUSUM on |residual|: S' = max(0, S + |r| - drift), alarm once
// S' exceeds the threshold. The detector freezes after its alarm; stepping it
// again is a contract violation.
class CusumDetector {
 public:
  CusumDetector(double drift, double threshold);

  void step(double residual, int step_index);

  double statistic() const { return s_; }
  double drift() const { return drift_; }
  double threshold() const { return threshold_; }
  std::optional<int> alarm_step() const { return alarm_step_; }

 private:
  double drift_;
  double threshold_;
  double s_ = 0.0;
  std::optional<int> alarm_step_;
};

// Ring buffer of recent (step, belief) pairs with strictly increasing steps.
// Enables rolling the estimator back to a pre-attack belief.
class BeliefBuffer {
 public:
  explicit BeliefBuffer(std::size_t capacity);

  void push(int step, const GaussianBelief& belief);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Newest entry with step <= target, if any.
  std::optional<std::pair<int, GaussianBelief>> newest_at_or_before(
      int target) const;

 private:
  std::size_t capacity_;
  std::deque<std::pair<int, GaussianBelief>> entries_;
};

// Innovation of one sensor: y[sensor] - (C mean)[sensor].
double residual(const LinearModel& model, const GaussianBelief& belief,
                const Vec& y, int sensor);

// Newest buffered belief recorded at or before alarm_step - window. Raises
// EpisodeError when the buffer holds no such entry.
std::pair<int, GaussianBelief> rollback_anchor(const BeliefBuffer& buffer,
                                               int alarm_step, int window);

}  // namespace sim
