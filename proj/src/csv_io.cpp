#include "sim/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sim {

namespace {

constexpr const char* kRecordsHeader =
    "seed,sigma,controller,attack_step,alarm_step,recovery_steps,"
    "final_distance,success,reasons";

constexpr const char* kTrajectoryHeader =
    "step,controller,mode,altitude,velocity,input,gps_alt,velocity_meas,"
    "gps_alt_attacked,velocity_meas_attacked,band_lo,band_hi";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "csv line " << line_no << ": " << what;
  throw std::runtime_error(msg.str());
}

double parse_double(const std::string& s, int line_no) {
  if (s.empty()) fail_line(line_no, "empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) fail_line(line_no, "bad number: " + s);
  return v;
}

long long parse_int(const std::string& s, int line_no) {
  if (s.empty()) fail_line(line_no, "empty integer field");
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) fail_line(line_no, "bad integer: " + s);
  return v;
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kNominal: return "nominal";
    case Mode::kAttackedUndetected: return "attacked-undetected";
    case Mode::kRecovery: return "recovery";
  }
  return "nominal";
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void write_records_csv(const std::vector<RunRecord>& records,
                       std::ostream& out) {
  out << kRecordsHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.seed << ',' << format_double(r.sigma) << ',' << r.controller
        << ',' << r.attack_step << ',';
    if (r.alarm_step) out << *r.alarm_step;
    out << ',' << r.recovery_steps << ',' << format_double(r.final_distance)
        << ',' << (r.success ? "true" : "false") << ',';
    for (std::size_t i = 0; i < r.reasons.size(); ++i) {
      if (i) out << ';';
      out << r.reasons[i];
    }
    out << '\n';
  }
}

void write_records_csv(const std::vector<RunRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_records_csv(records, out);
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail_line(1, "missing header");
  ++line_no;
  if (line != kRecordsHeader) fail_line(1, "unexpected header: " + line);

  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 9) {
      fail_line(line_no, "expected 9 fields, got " +
                             std::to_string(fields.size()));
    }
    RunRecord r;
    r.seed = static_cast<std::uint64_t>(parse_int(fields[0], line_no));
    r.sigma = parse_double(fields[1], line_no);
    r.controller = fields[2];
    r.attack_step = static_cast<int>(parse_int(fields[3], line_no));
    if (!fields[4].empty()) {
      r.alarm_step = static_cast<int>(parse_int(fields[4], line_no));
    }
    r.recovery_steps = static_cast<int>(parse_int(fields[5], line_no));
    r.final_distance = parse_double(fields[6], line_no);
    if (fields[7] == "true") {
      r.success = true;
    } else if (fields[7] == "false") {
      r.success = false;
    } else {
      fail_line(line_no, "bad boolean: " + fields[7]);
    }
    if (!fields[8].empty()) r.reasons = split(fields[8], ';');
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RunRecord> read_records_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_records_csv(in);
}

void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& controller, double band_lo,
                          double band_hi, std::ostream& out) {
  out << kTrajectoryHeader << '\n';
  for (const auto& step : trajectory.steps) {
    out << step.step << ',' << controller << ',' << mode_name(step.mode) << ','
        << format_double(step.state(0)) << ',' << format_double(step.state(1))
        << ',' << format_double(step.input.size() ? step.input(0) : 0.0) << ','
        << format_double(step.measurement(0)) << ','
        << format_double(step.measurement(1)) << ','
        << format_double(step.attacked_measurement(0)) << ','
        << format_double(step.attacked_measurement(1)) << ','
        << format_double(band_lo) << ',' << format_double(band_hi) << '\n';
  }
}

void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& controller, double band_lo,
                          double band_hi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_trajectory_csv(trajectory, controller, band_lo, band_hi, out);
}

TrajectorySeries read_trajectory_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail_line(1, "missing header");
  ++line_no;
  if (line != kTrajectoryHeader) fail_line(1, "unexpected header: " + line);

  TrajectorySeries series;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 12) {
      fail_line(line_no, "expected 12 fields, got " +
                             std::to_string(fields.size()));
    }
    series.steps.push_back(static_cast<int>(parse_int(fields[0], line_no)));
    series.controller = fields[1];
    series.altitude.push_back(parse_double(fields[3], line_no));
    series.band_lo = parse_double(fields[10], line_no);
    series.band_hi = parse_double(fields[11], line_no);
  }
  return series;
}

TrajectorySeries read_trajectory_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_trajectory_csv(in);
}

}  // namespace sim
