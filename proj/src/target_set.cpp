#include "sim/target_set.hpp"

#include <algorithm>
#include <cmath>

namespace sim {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double band_probability(double m, double sd, double lo, double hi) {
  if (sd > 0.0) {
    double p = normal_cdf((hi - m) / sd) - normal_cdf((lo - m) / sd);
    return std::clamp(p, 0.0, 1.0);
  }
  return (lo <= m && m <= hi) ? 1.0 : 0.0;
}

StripValidation validate_params(TargetForm form, const Vec& theta1,
                                double theta2, double theta3) {
  if (form != TargetForm::kStrip) {
    throw ContractViolation("unknown target set form");
  }
  StripValidation out;
  bool finite = theta1.allFinite() && std::isfinite(theta2) &&
                std::isfinite(theta3);
  if (!finite) out.violations.emplace_back("non-finite parameter");
  if (finite && theta1.norm() == 0.0) {
    out.violations.emplace_back("zero direction");
  }
  if (finite && theta2 > theta3) out.violations.emplace_back("empty strip");
  if (theta1.size() == 0) out.violations.emplace_back("zero direction");
  if (out.violations.empty()) {
    out.strip = Strip{theta1, theta2, theta3};
  }
  return out;
}

bool contains(const Strip& s, const State& x) {
  if (x.size() != s.theta1.size()) {
    throw ContractViolation("contains: dimension mismatch");
  }
  const double proj = s.theta1.dot(x);
  return proj >= s.theta2 && proj <= s.theta3;
}

double distance_to_center(const Strip& s, const State& x) {
  if (x.size() != s.theta1.size()) {
    throw ContractViolation("distance_to_center: dimension mismatch");
  }
  const double center = 0.5 * (s.theta2 + s.theta3);
  return std::abs(s.theta1.dot(x) - center) / s.theta1.norm();
}

double strip_probability(const Strip& s, const GaussianBelief& b) {
  if (b.mean.size() != s.theta1.size() ||
      b.cov.rows() != s.theta1.size()) {
    throw ContractViolation("strip_probability: dimension mismatch");
  }
  const double m = s.theta1.dot(b.mean);
  const double var = std::max(0.0, s.theta1.dot(b.cov * s.theta1));
  return band_probability(m, std::sqrt(var), s.theta2, s.theta3);
}

}  // namespace sim
