#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sim/harness.hpp"

namespace sim {

// Results CSV with the fixed header
//   seed,sigma,controller,attack_step,alarm_step,recovery_steps,
//   final_distance,success,reasons
// Floats carry 9 significant digits; alarm_step is empty when no alarm fired;
// reasons are semicolon-joined. Round-trips are lossless at that precision.
void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_records_csv(const std::vector<RunRecord>& records,
                       const std::string& path);

// Raises std::runtime_error naming the offending line on malformed input.
std::vector<RunRecord> read_records_csv(std::istream& in);
std::vector<RunRecord> read_records_csv_file(const std::string& path);

// Per-step trajectory dump for the 2-state drone model, including the target
// band so plots can shade it.
void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& controller, double band_lo,
                          double band_hi, std::ostream& out);
void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& controller, double band_lo,
                          double band_hi, const std::string& path);

struct TrajectorySeries {
  std::string controller;
  std::vector<int> steps;
  std::vector<double> altitude;
  double band_lo = 0.0;
  double band_hi = 0.0;
};

TrajectorySeries read_trajectory_csv(std::istream& in);
TrajectorySeries read_trajectory_csv_file(const std::string& path);

// 9-significant-digit float formatting shared by all CSV writers.
std::string format_double(double value);

}  // namespace sim
