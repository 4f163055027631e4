#include "sim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sim {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void expand(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
};

struct Frame {
  Range x, y;
  double sx(double v) const {
    const double span = x.hi - x.lo;
    const double f = span > 0 ? (v - x.lo) / span : 0.5;
    return kMarginLeft + f * (kWidth - kMarginLeft - kMarginRight);
  }
  double sy(double v) const {
    const double span = y.hi - y.lo;
    const double f = span > 0 ? (v - y.lo) / span : 0.5;
    return kHeight - kMarginBottom - f * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

void open_svg(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title
      << "</text>\n";
}

void draw_axes(std::ostream& out, const Frame& frame,
               const std::string& x_label, const std::string& y_label) {
  const double x0 = kMarginLeft;
  const double x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom;
  const double y1 = kMarginTop;
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1
      << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0
      << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = frame.x.lo + (frame.x.hi - frame.x.lo) * i / kTicks;
    const double px = frame.sx(fx);
    out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px
        << "\" y2=\"" << y0 + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << y0 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt(fx) << "</text>\n";

    const double fy = frame.y.lo + (frame.y.hi - frame.y.lo) * i / kTicks;
    const double py = frame.sy(fy);
    out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0
        << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt(fy) << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << (y0 + y1) / 2
      << ")\">" << y_label << "</text>\n";
}

void draw_series(std::ostream& out, const Frame& frame,
                 const std::vector<std::pair<std::string,
                                             std::vector<std::pair<double, double>>>>& series) {
  int color = 0;
  for (const auto& [label, pts] : series) {
    const char* stroke = kPalette[color % 6];
    std::ostringstream poly;
    for (const auto& [x, y] : pts) {
      poly << fmt(frame.sx(x)) << ',' << fmt(frame.sy(y)) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"2\" points=\"" << poly.str() << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << fmt(frame.sx(x)) << "\" cy=\""
          << fmt(frame.sy(y)) << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
    }
    const double ly = kMarginTop + 18 * color;
    out << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\"" << ly
        << "\" x2=\"" << kWidth - kMarginRight + 34 << "\" y2=\"" << ly
        << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << label
        << "</text>\n";
    ++color;
  }
}

}  // namespace

void emit_plot_aggregates(const std::vector<Aggregate>& aggregates,
                          const std::string& metric, std::ostream& out) {
  if (metric != "success_rate" && metric != "mean_distance") {
    throw ContractViolation("unknown metric: " + metric);
  }
  if (aggregates.empty()) throw ContractViolation("empty data");

  std::vector<std::string> controllers;
  for (const auto& a : aggregates) {
    if (std::find(controllers.begin(), controllers.end(), a.controller) ==
        controllers.end()) {
      controllers.push_back(a.controller);
    }
  }
  std::sort(controllers.begin(), controllers.end());

  Frame frame;
  frame.x = {aggregates.front().sigma, aggregates.front().sigma};
  frame.y = {0.0, metric == "success_rate" ? 1.0 : 0.0};
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
      series;
  for (const auto& name : controllers) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& a : aggregates) {
      if (a.controller != name) continue;
      const double v =
          metric == "success_rate" ? a.success_rate : a.mean_distance;
      pts.emplace_back(a.sigma, v);
      frame.x.expand(a.sigma);
      frame.y.expand(v);
    }
    std::sort(pts.begin(), pts.end());
    series.emplace_back(name, std::move(pts));
  }

  const std::string y_label = metric == "success_rate"
                                  ? "success rate"
                                  : "mean distance to center (m)";
  open_svg(out, metric == "success_rate"
                    ? "Recovery success rate vs sensor noise"
                    : "Distance to target center vs sensor noise");
  draw_axes(out, frame, "gps noise multiplier", y_label);
  draw_series(out, frame, series);
  out << "</svg>\n";
}

void emit_plot_aggregates(const std::vector<Aggregate>& aggregates,
                          const std::string& metric, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  emit_plot_aggregates(aggregates, metric, out);
}

void emit_plot_timeseries(const std::vector<TrajectorySeries>& series,
                          std::ostream& out) {
  if (series.empty()) throw ContractViolation("empty data");
  for (const auto& s : series) {
    if (s.steps.empty()) throw ContractViolation("empty data");
  }

  Frame frame;
  frame.x = {static_cast<double>(series.front().steps.front()),
             static_cast<double>(series.front().steps.front())};
  frame.y = {series.front().altitude.front(), series.front().altitude.front()};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      frame.x.expand(static_cast<double>(s.steps[i]));
      frame.y.expand(s.altitude[i]);
    }
    frame.y.expand(s.band_lo);
    frame.y.expand(s.band_hi);
  }

  open_svg(out, "Altitude during attack and recovery");
  // Shaded target band behind the series.
  const double band_lo = series.front().band_lo;
  const double band_hi = series.front().band_hi;
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << frame.sy(band_hi)
      << "\" width=\"" << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << std::max(0.0, frame.sy(band_lo) - frame.sy(band_hi))
      << "\" fill=\"#2ca02c\" fill-opacity=\"0.2\"/>\n";
  draw_axes(out, frame, "step", "altitude (m)");
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
      line_series;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(s.steps.size());
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      pts.emplace_back(static_cast<double>(s.steps[i]), s.altitude[i]);
    }
    line_series.emplace_back(s.controller, std::move(pts));
  }
  draw_series(out, frame, line_series);
  out << "</svg>\n";
}

void emit_plot_timeseries(const std::vector<TrajectorySeries>& series,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  emit_plot_timeseries(series, out);
}

}  // namespace sim
