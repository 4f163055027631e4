#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sim/csv_io.hpp"
#include "sim/harness.hpp"

namespace sim {

// Aggregate charts: one series per controller over the sigma multipliers,
// metric "success_rate" or "mean_distance". Self-contained SVG.
void emit_plot_aggregates(const std::vector<Aggregate>& aggregates,
                          const std::string& metric, std::ostream& out);
void emit_plot_aggregates(const std::vector<Aggregate>& aggregates,
                          const std::string& metric, const std::string& path);

// Altitude-vs-step chart with the target band shaded, one series per
// trajectory.
void emit_plot_timeseries(const std::vector<TrajectorySeries>& series,
                          std::ostream& out);
void emit_plot_timeseries(const std::vector<TrajectorySeries>& series,
                          const std::string& path);

}  // namespace sim
