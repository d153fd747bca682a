#pragma once

#include "vlcsim/sim.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vlcsim {

nlohmann::json to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const nlohmann::json& j);

/// Shipped presets: room2ap (8x4 m, 2 APs), room4ap (8x8 m, 4 APs on a 2x2
/// grid) and intuition (the two-zone two-user handover table).
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Loads a scenario JSON file; unknown keys are rejected. Throws
/// std::runtime_error naming the path on IO or parse errors.
ScenarioConfig load_scenario_file(const std::string& path);

/// FNV-1a 64-bit digest of the canonical JSON form, as fixed-width hex.
std::string config_digest(const ScenarioConfig& cfg);

/// Metrics CSV: one `# config ...` header line carrying the fully resolved
/// configuration (seed included), then a column header and one row per step.
void write_metrics_csv(const std::string& path, const ScenarioConfig& cfg,
                       const RunResult& result);

/// Summary JSON with totals, means and the config digest.
void write_summary_json(const std::string& path, const ScenarioConfig& cfg,
                        const RunResult& result);

/// Optional ground-truth trajectory dump: (time_s, user_id, x_m, y_m) rows.
void write_trajectory_csv(const std::string& path, const ScenarioConfig& cfg,
                          const RunResult& result);

}  // namespace vlcsim
