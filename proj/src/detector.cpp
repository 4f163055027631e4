#include "sim/detector.hpp"

#include <cmath>
#include <sstream>

namespace sim {

CusumDetector::CusumDetector(double drift, double threshold)
    : drift_(drift), threshold_(threshold) {
  if (drift_ < 0.0) throw ContractViolation("cusum drift must be >= 0");
  if (threshold_ <= 0.0) throw ContractViolation("cusum threshold must be > 0");
}

void CusumDetector::step(double residual, int step_index) {
  if (alarm_step_) {
    throw ContractViolation("cusum detector already fired");
  }
  s_ = std::max(0.0, s_ + std::abs(residual) - drift_);
  if (s_ > threshold_) {
    alarm_step_ = step_index;
  }
}

BeliefBuffer::BeliefBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ContractViolation("belief buffer capacity must be > 0");
}

void BeliefBuffer::push(int step, const GaussianBelief& belief) {
  if (!entries_.empty() && step <= entries_.back().first) {
    throw ContractViolation("belief buffer steps must be strictly increasing");
  }
  entries_.emplace_back(step, belief);
  if (entries_.size() > capacity_) entries_.pop_front();
}

std::optional<std::pair<int, GaussianBelief>> BeliefBuffer::newest_at_or_before(
    int target) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first <= target) return *it;
  }
  return std::nullopt;
}

double residual(const LinearModel& model, const GaussianBelief& belief,
                const Vec& y, int sensor) {
  if (sensor < 0 || sensor >= model.output_dim()) {
    throw ContractViolation("residual: sensor index out of range");
  }
  if (belief.mean.size() != model.state_dim() ||
      y.size() != model.output_dim()) {
    throw ContractViolation("residual: dimension mismatch");
  }
  return y(sensor) - model.C().row(sensor).dot(belief.mean);
}

std::pair<int, GaussianBelief> rollback_anchor(const BeliefBuffer& buffer,
                                               int alarm_step, int window) {
  if (window < 0) throw ContractViolation("rollback window must be >= 0");
  auto entry = buffer.newest_at_or_before(alarm_step - window);
  if (!entry) {
    std::ostringstream msg;
    msg << "rollback buffer underflow: no belief at or before step "
        << (alarm_step - window);
    throw EpisodeError(msg.str());
  }
  return *entry;
}

}  // namespace sim
