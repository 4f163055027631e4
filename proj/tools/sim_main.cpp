#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sim/csv_io.hpp"
#include "sim/harness.hpp"
#include "sim/svg_plot.hpp"

namespace {

double band_edge(const sim::Strip& strip, bool upper) {
  const double a = strip.theta1(0);
  const double e1 = strip.theta2 / a;
  const double e2 = strip.theta3 / a;
  return upper ? std::max(e1, e2) : std::min(e1, e2);
}

int run_command(const std::string& config_path, const std::string& controller,
                std::uint64_t seed, const std::string& traj_path) {
  const sim::ExperimentConfig config = sim::load_config(config_path);
  const auto kind = sim::controller_from_name(controller);
  const sim::EpisodeResult result = sim::run_episode(config, kind, seed);
  sim::write_records_csv({result.record}, std::cout);
  if (!traj_path.empty()) {
    double lo = 0.0, hi = 0.0;
    if (result.strip) {
      lo = band_edge(*result.strip, false);
      hi = band_edge(*result.strip, true);
    }
    sim::write_trajectory_csv(result.trajectory, result.record.controller, lo,
                              hi, traj_path);
  }
  return 0;
}

int sweep_command(const std::string& config_path, std::string out_path) {
  const sim::ExperimentConfig config = sim::load_config(config_path);
  if (out_path.empty()) out_path = config.output.results;
  const sim::SweepResult result = sim::sweep(config);
  sim::write_records_csv(result.records, out_path);

  std::cout << "sigma,controller,episodes,success_rate,mean_distance\n";
  for (const auto& agg : result.aggregates) {
    std::cout << sim::format_double(agg.sigma) << ',' << agg.controller << ','
              << agg.episodes << ',' << sim::format_double(agg.success_rate)
              << ',' << sim::format_double(agg.mean_distance) << '\n';
  }
  std::cout << "wrote " << result.records.size() << " records to " << out_path
            << '\n';
  return 0;
}

int plot_command(const std::string& in_path,
                 const std::vector<std::string>& traj_paths,
                 const std::string& metric, const std::string& out_path) {
  if (metric == "timeseries") {
    if (traj_paths.empty()) {
      throw sim::ContractViolation("timeseries plots need --traj input");
    }
    std::vector<sim::TrajectorySeries> series;
    series.reserve(traj_paths.size());
    for (const auto& path : traj_paths) {
      series.push_back(sim::read_trajectory_csv_file(path));
    }
    sim::emit_plot_timeseries(series, out_path);
  } else {
    if (in_path.empty()) {
      throw sim::ContractViolation("aggregate plots need --in results");
    }
    const auto records = sim::read_records_csv_file(in_path);
    const auto aggregates = sim::aggregate_records(records);
    sim::emit_plot_aggregates(aggregates, metric, out_path);
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int verify_command(const std::string& config_path,
                   const std::string& theta_json) {
  const sim::ExperimentConfig config = sim::load_config(config_path);
  const nlohmann::json doc = nlohmann::json::parse(theta_json);
  sim::RawTheta theta;
  const auto& t1 = doc.at("theta1");
  theta.theta1 = sim::Vec(static_cast<Eigen::Index>(t1.size()));
  for (std::size_t i = 0; i < t1.size(); ++i) {
    theta.theta1(static_cast<Eigen::Index>(i)) = t1[i].get<double>();
  }
  theta.theta2 = doc.at("theta2").get<double>();
  theta.theta3 = doc.at("theta3").get<double>();

  const sim::LinearModel model = config.make_model(1.0);
  sim::GaussianBelief belief{config.initial_state, model.R()};
  const sim::Verdict verdict =
      sim::verify_target(theta, model, belief, config.bounds(),
                         config.verifier.k_max, config.verifier.p_min,
                         config.context);

  nlohmann::ordered_json out;
  out["safe"] = verdict.safe;
  out["feasible"] = verdict.feasible;
  out["achievable_probability"] = verdict.achievable_probability;
  out["reasons"] = verdict.reasons;
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor-attack recovery simulator"};
  app.require_subcommand(1);

  std::string config_path, controller, traj_out, out_path, in_path, metric,
      theta_json;
  std::vector<std::string> traj_paths;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one episode");
  run->add_option("--config", config_path, "Config JSON file")->required();
  run->add_option("--controller", controller, "Recovery controller")
      ->required()
      ->check(CLI::IsMember({"opr-ol", "opr-pcl", "rtr-lqr", "vs"}));
  run->add_option("--seed", seed, "Episode seed")->required();
  run->add_option("--traj", traj_out, "Write the trajectory CSV here");

  auto* sweep = app.add_subcommand("sweep", "Run the full noise sweep");
  sweep->add_option("--config", config_path, "Config JSON file")->required();
  sweep->add_option("--out", out_path, "Results CSV path");

  auto* plot = app.add_subcommand("plot", "Render an SVG chart");
  plot->add_option("--in", in_path, "Results CSV from `sim sweep`");
  plot->add_option("--traj", traj_paths, "Trajectory CSV(s) from `sim run`");
  plot->add_option("--metric", metric, "What to plot")
      ->required()
      ->check(CLI::IsMember({"success_rate", "mean_distance", "timeseries"}));
  plot->add_option("--out", out_path, "Output SVG path")->required();

  auto* verify = app.add_subcommand("verify", "Verify a target set");
  verify->add_option("--config", config_path, "Config JSON file")->required();
  verify->add_option("--theta", theta_json, "Strip parameters as JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_command(config_path, controller, seed, traj_out);
    if (sweep->parsed()) return sweep_command(config_path, out_path);
    if (plot->parsed()) return plot_command(in_path, traj_paths, metric, out_path);
    if (verify->parsed()) return verify_command(config_path, theta_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
