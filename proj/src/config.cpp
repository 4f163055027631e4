#include "sim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sim {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ContractViolation("unknown config key: " + section + "." + key);
    }
  }
}

double get_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ContractViolation("config key " + key + " must be a number");
  }
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw ContractViolation("config key " + key + " must be an integer");
  }
  return obj[key].get<int>();
}

std::string get_str(const json& obj, const std::string& key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw ContractViolation("config key " + key + " must be a string");
  }
  return obj[key].get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    throw ContractViolation("config key " + key + " must be a boolean");
  }
  return obj[key].get<bool>();
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "none") return AttackKind::kNone;
  if (s == "bias") return AttackKind::kBias;
  if (s == "ramp") return AttackKind::kRamp;
  throw ContractViolation("unknown attack kind: " + s);
}

}  // namespace

LinearModel ExperimentConfig::make_model(double sigma_multiplier) const {
  return build_default_drone_model(model.dt,
                                   model.sigma_gps * sigma_multiplier,
                                   model.sigma_vel, model.q_pos, model.q_vel);
}

InputBounds ExperimentConfig::bounds() const {
  InputBounds b;
  b.u_min = Vec::Constant(1, recovery.u_min);
  b.u_max = Vec::Constant(1, recovery.u_max);
  return b;
}

namespace {
// Below 2% of the nominal gps noise the process noise dominates the
// innovation; the detector scaling bottoms out there.
constexpr double kDetectorScaleFloor = 0.02;
}  // namespace

double ExperimentConfig::detector_drift(double sigma_multiplier) const {
  if (!detector.scale_with_sigma) return detector.drift;
  return detector.drift * std::max(sigma_multiplier, kDetectorScaleFloor);
}

double ExperimentConfig::detector_threshold(double sigma_multiplier) const {
  if (!detector.scale_with_sigma) return detector.threshold;
  return detector.threshold *
         std::clamp(sigma_multiplier, kDetectorScaleFloor, 1.0);
}

void ExperimentConfig::validate() const {
  if (model.dt <= 0.0) throw ContractViolation("model.dt must be > 0");
  if (model.sigma_gps < 0.0 || model.sigma_vel < 0.0 || model.q_pos < 0.0 ||
      model.q_vel < 0.0) {
    throw ContractViolation("noise magnitudes must be nonnegative");
  }
  if (initial_state.size() != 2) {
    throw ContractViolation("initial state must have 2 entries");
  }
  validate_scenario(attack, make_model(1.0));
  if (detector.drift < 0.0) throw ContractViolation("detector.drift must be >= 0");
  if (detector.threshold <= 0.0) {
    throw ContractViolation("detector.threshold must be > 0");
  }
  if (detector.rollback_window < 0) {
    throw ContractViolation("detector.rollback_window must be >= 0");
  }
  if (planner.measurement_history < 1) {
    throw ContractViolation("planner.measurement_history must be >= 1");
  }
  if (planner.timeout_seconds <= 0.0) {
    throw ContractViolation("planner.timeout_seconds must be > 0");
  }
  if (!(context.z_min < context.z_max)) {
    throw ContractViolation("context requires z_min < z_max");
  }
  if (context.width <= 0.0) throw ContractViolation("context.width must be > 0");
  if (nominal.kp <= 0.0 || nominal.kd <= 0.0) {
    throw ContractViolation("nominal gains must be > 0");
  }
  if (recovery.p_target <= 0.0 || recovery.p_target > 1.0) {
    throw ContractViolation("recovery.p_target must be in (0, 1]");
  }
  if (recovery.k_max < 1) throw ContractViolation("recovery.k_max must be >= 1");
  if (recovery.u_min > recovery.u_max) {
    throw ContractViolation("recovery bounds require u_min <= u_max");
  }
  if (recovery.lqr_horizon < 1) {
    throw ContractViolation("recovery.lqr_horizon must be >= 1");
  }
  if (recovery.lqr_input_cost <= 0.0) {
    throw ContractViolation("recovery.lqr_input_cost must be > 0");
  }
  if (verifier.p_min <= 0.0 || verifier.p_min > 1.0) {
    throw ContractViolation("verifier.p_min must be in (0, 1]");
  }
  if (verifier.k_max < 1) throw ContractViolation("verifier.k_max must be >= 1");
  if (episode.length < 1) throw ContractViolation("episode.length must be >= 1");
  if (attack.kind != AttackKind::kNone &&
      episode.length <= attack.start_step) {
    throw ContractViolation("episode.length must exceed the attack start");
  }
  if (sweep.sigma_multipliers.empty()) {
    throw ContractViolation("sweep.sigma_multipliers must be nonempty");
  }
  // Zero is allowed so noise-free studies can run; negatives are not.
  for (double m : sweep.sigma_multipliers) {
    if (m < 0.0) throw ContractViolation("sigma multipliers must be >= 0");
  }
  if (sweep.seeds < 1) throw ContractViolation("sweep.seeds must be >= 1");
  if (sweep.controllers.empty()) {
    throw ContractViolation("sweep.controllers must be nonempty");
  }
  for (const auto& name : sweep.controllers) {
    if (name != "opr-ol" && name != "opr-pcl" && name != "rtr-lqr" &&
        name != "vs") {
      throw ContractViolation("unknown controller: " + name);
    }
  }
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.is_object()) throw ContractViolation("config must be a JSON object");

  ExperimentConfig cfg;
  reject_unknown_keys(doc, "",
                      {"model", "initial_state", "attack", "detector",
                       "planner", "context", "nominal", "recovery", "verifier",
                       "episode", "sweep", "output"});

  if (doc.contains("model")) {
    const auto& m = doc["model"];
    reject_unknown_keys(m, "model",
                        {"dt", "sigma_gps", "sigma_vel", "q_pos", "q_vel"});
    cfg.model.dt = get_num(m, "dt", cfg.model.dt);
    cfg.model.sigma_gps = get_num(m, "sigma_gps", cfg.model.sigma_gps);
    cfg.model.sigma_vel = get_num(m, "sigma_vel", cfg.model.sigma_vel);
    cfg.model.q_pos = get_num(m, "q_pos", cfg.model.q_pos);
    cfg.model.q_vel = get_num(m, "q_vel", cfg.model.q_vel);
  }
  if (doc.contains("initial_state")) {
    const auto& arr = doc["initial_state"];
    if (!arr.is_array() || arr.size() != 2) {
      throw ContractViolation("initial_state must be a 2-element array");
    }
    cfg.initial_state = Vec(2);
    cfg.initial_state << arr[0].get<double>(), arr[1].get<double>();
  }
  if (doc.contains("attack")) {
    const auto& a = doc["attack"];
    reject_unknown_keys(
        a, "attack", {"kind", "sensor", "start_step", "magnitude", "slope"});
    cfg.attack.kind = attack_kind_from_string(get_str(a, "kind", "bias"));
    cfg.attack.target_sensor = get_int(a, "sensor", cfg.attack.target_sensor);
    cfg.attack.start_step = get_int(a, "start_step", cfg.attack.start_step);
    cfg.attack.magnitude = get_num(a, "magnitude", cfg.attack.magnitude);
    cfg.attack.slope = get_num(a, "slope", cfg.attack.slope);
  }
  if (doc.contains("detector")) {
    const auto& d = doc["detector"];
    reject_unknown_keys(
        d, "detector",
        {"drift", "threshold", "rollback_window", "scale_with_sigma"});
    cfg.detector.drift = get_num(d, "drift", cfg.detector.drift);
    cfg.detector.threshold = get_num(d, "threshold", cfg.detector.threshold);
    cfg.detector.rollback_window =
        get_int(d, "rollback_window", cfg.detector.rollback_window);
    cfg.detector.scale_with_sigma =
        get_bool(d, "scale_with_sigma", cfg.detector.scale_with_sigma);
  }
  if (doc.contains("planner")) {
    const auto& p = doc["planner"];
    reject_unknown_keys(
        p, "planner",
        {"external_command", "timeout_seconds", "measurement_history"});
    cfg.planner.external_command =
        get_str(p, "external_command", cfg.planner.external_command);
    cfg.planner.timeout_seconds =
        get_num(p, "timeout_seconds", cfg.planner.timeout_seconds);
    cfg.planner.measurement_history =
        get_int(p, "measurement_history", cfg.planner.measurement_history);
  }
  if (doc.contains("context")) {
    const auto& c = doc["context"];
    reject_unknown_keys(c, "context", {"setpoint", "z_min", "z_max", "width"});
    cfg.context.setpoint = get_num(c, "setpoint", cfg.context.setpoint);
    cfg.context.z_min = get_num(c, "z_min", cfg.context.z_min);
    cfg.context.z_max = get_num(c, "z_max", cfg.context.z_max);
    cfg.context.width = get_num(c, "width", cfg.context.width);
  }
  if (doc.contains("nominal")) {
    const auto& nom = doc["nominal"];
    reject_unknown_keys(nom, "nominal", {"kp", "kd"});
    cfg.nominal.kp = get_num(nom, "kp", cfg.nominal.kp);
    cfg.nominal.kd = get_num(nom, "kd", cfg.nominal.kd);
  }
  if (doc.contains("recovery")) {
    const auto& r = doc["recovery"];
    reject_unknown_keys(r, "recovery",
                        {"p_target", "k_max", "u_min", "u_max", "lqr_horizon",
                         "lqr_pos_cost", "lqr_vel_cost", "lqr_input_cost"});
    cfg.recovery.p_target = get_num(r, "p_target", cfg.recovery.p_target);
    cfg.recovery.k_max = get_int(r, "k_max", cfg.recovery.k_max);
    cfg.recovery.u_min = get_num(r, "u_min", cfg.recovery.u_min);
    cfg.recovery.u_max = get_num(r, "u_max", cfg.recovery.u_max);
    cfg.recovery.lqr_horizon =
        get_int(r, "lqr_horizon", cfg.recovery.lqr_horizon);
    cfg.recovery.lqr_pos_cost =
        get_num(r, "lqr_pos_cost", cfg.recovery.lqr_pos_cost);
    cfg.recovery.lqr_vel_cost =
        get_num(r, "lqr_vel_cost", cfg.recovery.lqr_vel_cost);
    cfg.recovery.lqr_input_cost =
        get_num(r, "lqr_input_cost", cfg.recovery.lqr_input_cost);
  }
  if (doc.contains("verifier")) {
    const auto& v = doc["verifier"];
    reject_unknown_keys(v, "verifier", {"p_min", "k_max"});
    cfg.verifier.p_min = get_num(v, "p_min", cfg.verifier.p_min);
    cfg.verifier.k_max = get_int(v, "k_max", cfg.verifier.k_max);
  }
  if (doc.contains("episode")) {
    const auto& e = doc["episode"];
    reject_unknown_keys(e, "episode", {"length"});
    cfg.episode.length = get_int(e, "length", cfg.episode.length);
  }
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    reject_unknown_keys(
        s, "sweep",
        {"sigma_multipliers", "seeds", "base_seed", "controllers"});
    if (s.contains("sigma_multipliers")) {
      if (!s["sigma_multipliers"].is_array()) {
        throw ContractViolation("sweep.sigma_multipliers must be an array");
      }
      cfg.sweep.sigma_multipliers.clear();
      for (const auto& v : s["sigma_multipliers"]) {
        cfg.sweep.sigma_multipliers.push_back(v.get<double>());
      }
    }
    cfg.sweep.seeds = get_int(s, "seeds", cfg.sweep.seeds);
    if (s.contains("base_seed")) {
      cfg.sweep.base_seed = s["base_seed"].get<std::uint64_t>();
    }
    if (s.contains("controllers")) {
      if (!s["controllers"].is_array()) {
        throw ContractViolation("sweep.controllers must be an array");
      }
      cfg.sweep.controllers.clear();
      for (const auto& v : s["controllers"]) {
        cfg.sweep.controllers.push_back(v.get<std::string>());
      }
    }
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    reject_unknown_keys(o, "output", {"results"});
    cfg.output.results = get_str(o, "results", cfg.output.results);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

}  // namespace sim
