#include "vlcsim/sim.hpp"

#include "vlcsim/fairness.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace vlcsim {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int ScenarioConfig::steps() const {
  return static_cast<int>(std::llround(duration_s / tau_p_s));
}

void ScenarioConfig::validate() const {
  room.validate();
  aps.validate();
  mobility.validate();
  for (const auto& p : aps.positions)
    if (!room.contains(p))
      throw std::invalid_argument("scenario: AP position outside the room");
  if (users < 1) throw std::invalid_argument("scenario: users must be >= 1");
  if (!(beta > 1.0)) throw std::invalid_argument("scenario: beta must be > 1");
  if (!(eta0 > 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("scenario: eta0 must be in (0, 1]");
  if (horizon < 1) throw std::invalid_argument("scenario: prediction level T must be >= 1");
  if (!(tau_p_s > 0.0)) throw std::invalid_argument("scenario: tau_p must be > 0");
  if (!(duration_s >= tau_p_s))
    throw std::invalid_argument("scenario: duration must cover at least one service time");
  solver.validate();
  if (!(enumeration_cap > 0.0))
    throw std::invalid_argument("scenario: enumeration cap must be > 0");
}

double realized_rate(const Vec2& true_pos, int ap, double share, bool kept_ap,
                     const ApLayout& layout, double eta0) {
  const double eta = handover_efficiency(kept_ap ? 1.0 : 0.0, eta0);
  return share * eta * achievable_rate(true_pos, ap, layout);
}

int handover_count(const std::vector<std::vector<int>>& assignment_history) {
  int count = 0;
  for (std::size_t step = 1; step < assignment_history.size(); ++step)
    for (std::size_t u = 0; u < assignment_history[step].size(); ++u)
      if (assignment_history[step][u] != assignment_history[step - 1][u]) ++count;
  return count;
}

double total_objective(const std::vector<MetricsRecord>& records) {
  double total = 0.0;
  for (const auto& rec : records) total += rec.objective;
  return total;
}

namespace {

// Rate-argmax association used for x^0 before the first solve (no penalty).
std::vector<int> argmax_assignment(const std::vector<Vec2>& positions,
                                   const ApLayout& layout) {
  std::vector<int> out(positions.size(), 0);
  for (std::size_t u = 0; u < positions.size(); ++u) {
    double best = -1.0;
    for (int a = 0; a < layout.count(); ++a) {
      const double r = achievable_rate(positions[u], a, layout);
      if (r > best) {
        best = r;
        out[u] = a;
      }
    }
  }
  return out;
}

struct SimState {
  std::vector<UserState> users;
  std::vector<Rng> rngs;
  std::vector<Vec2> pos_prev, pos_now;
  std::vector<int> committed;  // x^0 threading between steps
};

std::vector<PositionFrame> predicted_frames(const ScenarioConfig& cfg, const SimState& st) {
  std::vector<PositionFrame> frames(static_cast<std::size_t>(cfg.horizon),
                                    PositionFrame(st.users.size()));
  if (cfg.prediction_mode == PredictionMode::TwoFixEstimate) {
    for (std::size_t u = 0; u < st.users.size(); ++u) {
      const auto path = predict(st.pos_prev[u], st.pos_now[u], cfg.tau_p_s, cfg.horizon, cfg.room);
      for (int t = 0; t < cfg.horizon; ++t) frames[static_cast<std::size_t>(t)][u] = path[static_cast<std::size_t>(t)];
    }
  } else {
    // Ground-truth future: step a copy of the walker and its RNG stream.
    for (std::size_t u = 0; u < st.users.size(); ++u) {
      UserState ghost = st.users[u];
      Rng ghost_rng = st.rngs[u];
      for (int t = 0; t < cfg.horizon; ++t) {
        rwp_step(ghost, cfg.tau_p_s, cfg.room, cfg.mobility, ghost_rng);
        frames[static_cast<std::size_t>(t)][u] = ghost.position;
      }
    }
  }
  return frames;
}

ProblemInstance make_instance(const ScenarioConfig& cfg, const SimState& st) {
  ProblemInstance inst;
  inst.rates = rate_tensor(predicted_frames(cfg, st), cfg.aps, cfg.horizon);
  inst.prev_ap = st.committed;
  inst.eta0 = cfg.eta0;
  inst.beta = cfg.beta;
  inst.horizon = cfg.horizon;
  return inst;
}

SimState init_state(const ScenarioConfig& cfg, std::vector<UserState> initial) {
  SimState st;
  st.users = std::move(initial);
  st.rngs.reserve(st.users.size());
  for (std::size_t u = 0; u < st.users.size(); ++u)
    st.rngs.emplace_back(mix_seed(cfg.seed, u + 1));
  st.pos_now.resize(st.users.size());
  for (std::size_t u = 0; u < st.users.size(); ++u) st.pos_now[u] = st.users[u].position;
  st.pos_prev = st.pos_now;  // first step sees zero estimated velocity
  st.committed = argmax_assignment(st.pos_now, cfg.aps);
  return st;
}

void advance_truth(const ScenarioConfig& cfg, SimState& st) {
  st.pos_prev = st.pos_now;
  for (std::size_t u = 0; u < st.users.size(); ++u) {
    rwp_step(st.users[u], cfg.tau_p_s, cfg.room, cfg.mobility, st.rngs[u]);
    st.pos_now[u] = st.users[u].position;
  }
}

MetricsRecord score_step(const ScenarioConfig& cfg, const SimState& st,
                         const std::vector<int>& assignment, const ArrayXXd& p1,
                         const std::vector<int>& previous, int step) {
  MetricsRecord rec;
  rec.service_time_index = step;
  rec.time_s = (step + 1) * cfg.tau_p_s;
  const double rate_floor = cfg.solver.p_floor * cfg.aps.phy.bandwidth_hz;
  for (std::size_t u = 0; u < st.users.size(); ++u) {
    const int a = assignment[u];
    const bool kept = previous[u] == a;
    const double rate = realized_rate(st.pos_now[u], a,
                                      p1(static_cast<Eigen::Index>(u), a), kept,
                                      cfg.aps, cfg.eta0);
    rec.throughput_bps += rate;
    rec.objective += psi(std::max(rate, rate_floor), cfg.beta);
    if (!kept) ++rec.handovers;
  }
  return rec;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg) {
  cfg.validate();
  return run(cfg, rwp_init(cfg.room, cfg.mobility, cfg.users, cfg.seed));
}

RunResult run(const ScenarioConfig& cfg, std::vector<UserState> initial_users) {
  cfg.validate();
  if (static_cast<int>(initial_users.size()) != cfg.users)
    throw std::invalid_argument("run: initial user states do not match the configured count");
  for (const auto& u : initial_users)
    if (!cfg.room.contains(u.position) || !cfg.room.contains(u.waypoint))
      throw std::invalid_argument("run: initial user state outside the room");

  SimState st = init_state(cfg, std::move(initial_users));
  const int steps = cfg.steps();
  RunResult result;
  result.records.reserve(static_cast<std::size_t>(steps));
  result.assignment_history.reserve(static_cast<std::size_t>(steps));

  for (int step = 0; step < steps; ++step) {
    const ProblemInstance inst = make_instance(cfg, st);

    const auto t0 = std::chrono::steady_clock::now();
    AllocationSolution sol;
    bool failed = false;
    if (cfg.algorithm == Algorithm::Exhaustive) {
      sol = exhaustive_solve(inst, cfg.enumeration_cap);
    } else {
      sol = solve(inst, cfg.solver);
      failed = sol.diag.degenerate;
    }
    const double wall = seconds_since(t0);

    std::vector<int> assignment;
    ArrayXXd p1;
    if (failed) {
      // Degenerate solve: hold the previous association for this service time.
      assignment = st.committed;
      FeasibleAssignment keep{{assignment}};
      ProblemInstance one_step = inst;
      one_step.horizon = 1;
      one_step.rates.slices.resize(1);
      const auto shares = per_assignment_allocation(keep, one_step);
      p1 = ArrayXXd::Zero(inst.users(), inst.aps());
      for (int u = 0; u < inst.users(); ++u)
        p1(u, assignment[static_cast<std::size_t>(u)]) = shares[0](u);
    } else {
      assignment = sol.plan[0];
      p1 = sol.p1;
    }

    advance_truth(cfg, st);

    MetricsRecord rec = score_step(cfg, st, assignment, p1, st.committed, step);
    rec.solver_iterations = sol.diag.iterations;
    rec.wall_time_s = wall;
    rec.solver_error = failed;
    result.records.push_back(rec);
    result.assignment_history.push_back(assignment);
    result.position_history.push_back(st.pos_now);
    st.committed = assignment;
  }
  return result;
}

double OracleCompareResult::share_within(double g) const {
  if (rows.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& row : rows)
    if (row.gap <= g) ++ok;
  return static_cast<double>(ok) / static_cast<double>(rows.size());
}

OracleCompareResult oracle_compare(const ScenarioConfig& cfg) {
  cfg.validate();
  const double count = assignment_count(cfg.users, cfg.aps.count(), cfg.horizon);
  if (count > cfg.enumeration_cap)
    throw std::invalid_argument("oracle_compare: per-step instance size " +
                                std::to_string(count) + " exceeds the enumeration cap");

  SimState st = init_state(cfg, rwp_init(cfg.room, cfg.mobility, cfg.users, cfg.seed));
  const int steps = cfg.steps();
  OracleCompareResult result;
  result.rows.reserve(static_cast<std::size_t>(steps));

  for (int step = 0; step < steps; ++step) {
    const ProblemInstance inst = make_instance(cfg, st);

    auto t0 = std::chrono::steady_clock::now();
    const AllocationSolution mvr = solve(inst, cfg.solver);
    const double wall_mvr = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const AllocationSolution exact = exhaustive_solve(inst, cfg.enumeration_cap);
    const double wall_exact = seconds_since(t0);

    OracleCompareRow row;
    row.step = step;
    row.u_oracle = exact.utility;
    row.u_mvr = mvr.utility;
    row.gap = (exact.utility - mvr.utility) / std::abs(exact.utility);
    row.enumerated = static_cast<double>(exact.diag.iterations);
    row.wall_oracle_s = wall_exact;
    row.wall_mvr_s = wall_mvr;
    result.rows.push_back(row);
    result.total_u_oracle += exact.utility;
    result.total_u_mvr += mvr.utility;
    result.max_gap = std::max(result.max_gap, row.gap);

    // The shared closed-loop state follows the MVR commitment.
    advance_truth(cfg, st);
    st.committed = mvr.plan[0];
  }
  result.total_gap = (result.total_u_oracle - result.total_u_mvr) /
                     std::abs(result.total_u_oracle);
  return result;
}

IntuitionResult intuition_strategy_rates(double zone_rate_bps, double eta0) {
  if (!(zone_rate_bps > 0.0))
    throw std::invalid_argument("intuition: zone rate must be > 0");
  if (!(eta0 > 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("intuition: eta0 must be in (0, 1]");
  const double r = zone_rate_bps;
  IntuitionResult out;
  // Strategy 0: both users stay on the shared AP, then both hand over.
  out.first_step[0] = r / 4.0 + r / 4.0;
  out.second_step[0] = eta0 * r + eta0 * r;
  // Strategy 1: one user hands over now, the other at the next service time.
  out.first_step[1] = eta0 * r / 2.0 + r / 2.0;
  out.second_step[1] = r + eta0 * r;
  // Strategy 2: both hand over immediately.
  out.first_step[2] = eta0 * r / 2.0 + eta0 * r / 2.0;
  out.second_step[2] = r + r;
  for (int i = 0; i < 3; ++i) {
    out.average[i] = 0.5 * (out.first_step[i] + out.second_step[i]);
    if (out.average[i] > out.average[out.best]) out.best = i;
  }
  return out;
}

}  // namespace vlcsim
