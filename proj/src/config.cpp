#include "vlcsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vlcsim {

namespace {

using nlohmann::json;

std::string to_string(InterferencePolicy p) {
  return p == InterferencePolicy::FrequencyReuse ? "frequency_reuse" : "full_interference";
}

InterferencePolicy policy_from_string(const std::string& s) {
  if (s == "frequency_reuse") return InterferencePolicy::FrequencyReuse;
  if (s == "full_interference") return InterferencePolicy::FullInterference;
  throw std::runtime_error("config: unknown interference policy '" + s + "'");
}

std::string to_string(Algorithm a) {
  return a == Algorithm::Mvr ? "mvr" : "exhaustive";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "mvr") return Algorithm::Mvr;
  if (s == "exhaustive") return Algorithm::Exhaustive;
  throw std::runtime_error("config: unknown algorithm '" + s + "'");
}

std::string to_string(PredictionMode m) {
  return m == PredictionMode::OraclePositions ? "oracle_positions" : "two_fix_estimate";
}

PredictionMode prediction_from_string(const std::string& s) {
  if (s == "oracle_positions") return PredictionMode::OraclePositions;
  if (s == "two_fix_estimate") return PredictionMode::TwoFixEstimate;
  throw std::runtime_error("config: unknown prediction mode '" + s + "'");
}

std::string to_string(StepSchedule s) {
  return s == StepSchedule::Constant ? "constant" : "inv_sqrt";
}

StepSchedule schedule_from_string(const std::string& s) {
  if (s == "constant") return StepSchedule::Constant;
  if (s == "inv_sqrt") return StepSchedule::InvSqrt;
  throw std::runtime_error("config: unknown step schedule '" + s + "'");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    bool found = false;
    for (const char* k : known)
      if (item.key() == k) {
        found = true;
        break;
      }
    if (!found)
      throw std::runtime_error("config: unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nlohmann::json to_json(const ScenarioConfig& cfg) {
  json aps = json::array();
  for (const auto& p : cfg.aps.positions) aps.push_back({p.x(), p.y()});
  return json{
      {"name", cfg.name},
      {"room", {{"width_m", cfg.room.width}, {"depth_m", cfg.room.depth}}},
      {"aps",
       {{"positions_m", aps},
        {"interference_policy", to_string(cfg.aps.interference_policy)}}},
      {"phy",
       {{"half_intensity_angle_deg", cfg.aps.phy.half_intensity_angle_deg},
        {"pd_area_m2", cfg.aps.phy.pd_area_m2},
        {"fov_semi_angle_deg", cfg.aps.phy.fov_semi_angle_deg},
        {"refractive_index", cfg.aps.phy.refractive_index},
        {"optical_filter_gain", cfg.aps.phy.optical_filter_gain},
        {"tx_optical_power_w", cfg.aps.phy.tx_optical_power_w},
        {"oe_efficiency", cfg.aps.phy.oe_efficiency},
        {"dc_bias_ratio", cfg.aps.phy.dc_bias_ratio},
        {"noise_psd_w_per_hz", cfg.aps.phy.noise_psd_w_per_hz},
        {"bandwidth_hz", cfg.aps.phy.bandwidth_hz},
        {"vertical_distance_m", cfg.aps.phy.vertical_distance_m}}},
      {"mobility",
       {{"v_min_mps", cfg.mobility.v_min},
        {"v_max_mps", cfg.mobility.v_max},
        {"pause_min_s", cfg.mobility.pause_min},
        {"pause_max_s", cfg.mobility.pause_max}}},
      {"users", cfg.users},
      {"beta", cfg.beta},
      {"eta0", cfg.eta0},
      {"T", cfg.horizon},
      {"tau_p_s", cfg.tau_p_s},
      {"duration_s", cfg.duration_s},
      {"algorithm", to_string(cfg.algorithm)},
      {"seed", cfg.seed},
      {"prediction_mode", to_string(cfg.prediction_mode)},
      {"enumeration_cap", cfg.enumeration_cap},
      {"intuition_zone_rate_bps", cfg.intuition_zone_rate_bps},
      {"solver",
       {{"max_iterations", cfg.solver.max_iterations},
        {"step0", cfg.solver.step0},
        {"gamma_step_ratio", cfg.solver.gamma_step_ratio},
        {"schedule", to_string(cfg.solver.schedule)},
        {"tolerance", cfg.solver.tolerance},
        {"p_floor", cfg.solver.p_floor},
        {"lambda_floor", cfg.solver.lambda_floor},
        {"x_floor", cfg.solver.x_floor},
        {"gamma_floor", cfg.solver.gamma_floor},
        {"rate_scale_hz", cfg.solver.rate_scale_hz},
        {"trace_stride", cfg.solver.trace_stride},
        {"trace_csv", cfg.solver.trace_csv}}}};
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  reject_unknown(j,
                 {"name", "room", "aps", "phy", "mobility", "users", "beta", "eta0",
                  "T", "tau_p_s", "duration_s", "algorithm", "seed", "prediction_mode",
                  "enumeration_cap", "intuition_zone_rate_bps", "solver"},
                 "scenario");
  get_if_present(j, "name", cfg.name);
  if (j.contains("room")) {
    const auto& r = j.at("room");
    reject_unknown(r, {"width_m", "depth_m"}, "room");
    get_if_present(r, "width_m", cfg.room.width);
    get_if_present(r, "depth_m", cfg.room.depth);
  }
  if (j.contains("aps")) {
    const auto& a = j.at("aps");
    reject_unknown(a, {"positions_m", "interference_policy"}, "aps");
    if (a.contains("positions_m")) {
      cfg.aps.positions.clear();
      for (const auto& p : a.at("positions_m"))
        cfg.aps.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    if (a.contains("interference_policy"))
      cfg.aps.interference_policy =
          policy_from_string(a.at("interference_policy").get<std::string>());
  }
  if (j.contains("phy")) {
    const auto& p = j.at("phy");
    reject_unknown(p,
                   {"half_intensity_angle_deg", "pd_area_m2", "fov_semi_angle_deg",
                    "refractive_index", "optical_filter_gain", "tx_optical_power_w",
                    "oe_efficiency", "dc_bias_ratio", "noise_psd_w_per_hz",
                    "bandwidth_hz", "vertical_distance_m"},
                   "phy");
    auto& phy = cfg.aps.phy;
    get_if_present(p, "half_intensity_angle_deg", phy.half_intensity_angle_deg);
    get_if_present(p, "pd_area_m2", phy.pd_area_m2);
    get_if_present(p, "fov_semi_angle_deg", phy.fov_semi_angle_deg);
    get_if_present(p, "refractive_index", phy.refractive_index);
    get_if_present(p, "optical_filter_gain", phy.optical_filter_gain);
    get_if_present(p, "tx_optical_power_w", phy.tx_optical_power_w);
    get_if_present(p, "oe_efficiency", phy.oe_efficiency);
    get_if_present(p, "dc_bias_ratio", phy.dc_bias_ratio);
    get_if_present(p, "noise_psd_w_per_hz", phy.noise_psd_w_per_hz);
    get_if_present(p, "bandwidth_hz", phy.bandwidth_hz);
    get_if_present(p, "vertical_distance_m", phy.vertical_distance_m);
  }
  if (j.contains("mobility")) {
    const auto& m = j.at("mobility");
    reject_unknown(m, {"v_min_mps", "v_max_mps", "pause_min_s", "pause_max_s"}, "mobility");
    get_if_present(m, "v_min_mps", cfg.mobility.v_min);
    get_if_present(m, "v_max_mps", cfg.mobility.v_max);
    get_if_present(m, "pause_min_s", cfg.mobility.pause_min);
    get_if_present(m, "pause_max_s", cfg.mobility.pause_max);
  }
  get_if_present(j, "users", cfg.users);
  get_if_present(j, "beta", cfg.beta);
  get_if_present(j, "eta0", cfg.eta0);
  get_if_present(j, "T", cfg.horizon);
  get_if_present(j, "tau_p_s", cfg.tau_p_s);
  get_if_present(j, "duration_s", cfg.duration_s);
  if (j.contains("algorithm"))
    cfg.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  get_if_present(j, "seed", cfg.seed);
  if (j.contains("prediction_mode"))
    cfg.prediction_mode = prediction_from_string(j.at("prediction_mode").get<std::string>());
  get_if_present(j, "enumeration_cap", cfg.enumeration_cap);
  get_if_present(j, "intuition_zone_rate_bps", cfg.intuition_zone_rate_bps);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s,
                   {"max_iterations", "step0", "gamma_step_ratio", "schedule",
                    "tolerance", "p_floor", "lambda_floor", "x_floor", "gamma_floor",
                    "rate_scale_hz", "trace_stride", "trace_csv"},
                   "solver");
    get_if_present(s, "max_iterations", cfg.solver.max_iterations);
    get_if_present(s, "step0", cfg.solver.step0);
    get_if_present(s, "gamma_step_ratio", cfg.solver.gamma_step_ratio);
    if (s.contains("schedule"))
      cfg.solver.schedule = schedule_from_string(s.at("schedule").get<std::string>());
    get_if_present(s, "tolerance", cfg.solver.tolerance);
    get_if_present(s, "p_floor", cfg.solver.p_floor);
    get_if_present(s, "lambda_floor", cfg.solver.lambda_floor);
    get_if_present(s, "x_floor", cfg.solver.x_floor);
    get_if_present(s, "gamma_floor", cfg.solver.gamma_floor);
    get_if_present(s, "rate_scale_hz", cfg.solver.rate_scale_hz);
    get_if_present(s, "trace_stride", cfg.solver.trace_stride);
    get_if_present(s, "trace_csv", cfg.solver.trace_csv);
  }
  return cfg;
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  if (name == "room2ap") {
    cfg.room = {8.0, 4.0};
    cfg.aps.positions = {{2.0, 2.0}, {6.0, 2.0}};
  } else if (name == "room4ap") {
    cfg.room = {8.0, 8.0};
    cfg.aps.positions = {{2.0, 2.0}, {6.0, 2.0}, {2.0, 6.0}, {6.0, 6.0}};
  } else if (name == "intuition") {
    // Two-zone two-user handover table; the channel geometry is abstracted
    // into the zone rate, so the room only hosts the walkers.
    cfg.room = {8.0, 4.0};
    cfg.aps.positions = {{2.0, 2.0}, {6.0, 2.0}};
    cfg.users = 2;
    cfg.horizon = 2;
  } else {
    throw std::runtime_error("config: unknown preset '" + name +
                             "' (available: room2ap, room4ap, intuition)");
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"room2ap", "room4ap", "intuition"}; }

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("config: parse error in '" + path + "': " + e.what());
  }
  ScenarioConfig cfg = scenario_from_json(j);
  cfg.validate();
  return cfg;
}

std::string config_digest(const ScenarioConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;  // FNV-1a 64
  for (unsigned char ch : dump) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_metrics_csv(const std::string& path, const ScenarioConfig& cfg,
                       const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# config " << to_json(cfg).dump() << "\n";
  out << "# digest " << config_digest(cfg) << "\n";
  out << "step,time_s,throughput_bps,objective,handovers,iterations,wall_time_s\n";
  out.precision(17);
  for (const auto& rec : result.records)
    out << rec.service_time_index << ',' << rec.time_s << ',' << rec.throughput_bps
        << ',' << rec.objective << ',' << rec.handovers << ',' << rec.solver_iterations
        << ',' << rec.wall_time_s << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_trajectory_csv(const std::string& path, const ScenarioConfig& cfg,
                          const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# config " << to_json(cfg).dump() << "\n";
  out << "time_s,user_id,x_m,y_m\n";
  out.precision(17);
  for (std::size_t step = 0; step < result.position_history.size(); ++step)
    for (std::size_t u = 0; u < result.position_history[step].size(); ++u)
      out << result.records[step].time_s << ',' << u << ','
          << result.position_history[step][u].x() << ','
          << result.position_history[step][u].y() << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_summary_json(const std::string& path, const ScenarioConfig& cfg,
                        const RunResult& result) {
  double mean_throughput = 0.0;
  long solver_errors = 0;
  for (const auto& rec : result.records) {
    mean_throughput += rec.throughput_bps;
    if (rec.solver_error) ++solver_errors;
  }
  if (!result.records.empty()) mean_throughput /= static_cast<double>(result.records.size());
  nlohmann::json j{{"total_objective", total_objective(result.records)},
                   {"mean_throughput_bps", mean_throughput},
                   {"handovers", handover_count(result.assignment_history)},
                   {"steps", result.records.size()},
                   {"solver_errors", solver_errors},
                   {"config_digest", config_digest(cfg)},
                   {"config", to_json(cfg)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace vlcsim
