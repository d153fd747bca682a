#pragma once

#include "vlcsim/channel.hpp"
#include "vlcsim/mobility.hpp"
#include "vlcsim/oracle.hpp"
#include "vlcsim/solver.hpp"

#include <array>
#include <string>

namespace vlcsim {

enum class Algorithm { Mvr, Exhaustive };
enum class PredictionMode { OraclePositions, TwoFixEstimate };

struct ScenarioConfig {
  std::string name = "custom";
  Room room;
  ApLayout aps;
  MobilityParams mobility;
  int users = 15;
  double beta = 2.0;
  double eta0 = 0.75;
  int horizon = 1;        // prediction level T
  double tau_p_s = 0.3;   // service time
  double duration_s = 900.0;
  Algorithm algorithm = Algorithm::Mvr;
  std::uint64_t seed = 1;
  SolverConfig solver;
  PredictionMode prediction_mode = PredictionMode::TwoFixEstimate;
  double enumeration_cap = kDefaultEnumerationCap;
  double intuition_zone_rate_bps = 4e8;  // inner-zone rate of the `intuition` preset

  int steps() const;
  void validate() const;
};

struct MetricsRecord {
  int service_time_index = 0;
  double time_s = 0.0;
  double throughput_bps = 0.0;  // realized rates summed over users
  double objective = 0.0;       // sum of psi(realized rate) over users
  int handovers = 0;
  long solver_iterations = 0;
  double wall_time_s = 0.0;
  bool solver_error = false;    // degenerate solve; previous assignment retained
};

struct RunResult {
  std::vector<MetricsRecord> records;
  std::vector<std::vector<int>> assignment_history;  // [step][user]
  std::vector<PositionFrame> position_history;       // true positions, [step][user]
};

/// Closed-loop simulation: per service time step mobility, predict, build the
/// rate tensor, solve, commit the t = 1 decision against ground truth and
/// accumulate metrics. Deterministic for a fixed config (seed included).
RunResult run(const ScenarioConfig& cfg);
RunResult run(const ScenarioConfig& cfg, std::vector<UserState> initial_users);

/// Rate a user actually sees for one service time: its share times the
/// handover efficiency (applied when the AP changed) times the capacity at
/// its true position.
double realized_rate(const Vec2& true_pos, int ap, double share, bool kept_ap,
                     const ApLayout& layout, double eta0);

/// Number of (user, step) pairs whose AP differs from the previous step.
int handover_count(const std::vector<std::vector<int>>& assignment_history);

/// Sum of per-step objectives.
double total_objective(const std::vector<MetricsRecord>& records);

struct OracleCompareRow {
  int step = 0;
  double u_oracle = 0.0;
  double u_mvr = 0.0;
  double gap = 0.0;  // (U_oracle - U_mvr) / |U_oracle|
  double enumerated = 0.0;
  double wall_oracle_s = 0.0;
  double wall_mvr_s = 0.0;
};

struct OracleCompareResult {
  std::vector<OracleCompareRow> rows;
  double total_u_oracle = 0.0;
  double total_u_mvr = 0.0;
  double total_gap = 0.0;
  double max_gap = 0.0;
  /// Fraction of steps whose gap is within `g`.
  double share_within(double g) const;
};

/// Runs MVR closed-loop and, at every step, also solves the identical
/// instance exactly; the shared assignment state follows the MVR commitment.
OracleCompareResult oracle_compare(const ScenarioConfig& cfg);

/// Two-zone two-user handover table: aggregate rates of the three possible
/// handover schedules (both-late, split, both-early) over two service times.
/// zone_rate is the inner-zone full rate; the outer zone serves half of it.
struct IntuitionResult {
  std::array<double, 3> first_step{};   // aggregate rate at service time 1
  std::array<double, 3> second_step{};  // aggregate rate at service time 2
  std::array<double, 3> average{};      // two-step average
  int best = 0;                         // index of the highest average
};
IntuitionResult intuition_strategy_rates(double zone_rate_bps, double eta0);

}  // namespace vlcsim
