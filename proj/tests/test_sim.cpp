#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vlcsim/config.hpp"
#include "vlcsim/sim.hpp"

#include <cmath>

using namespace vlcsim;

namespace {

ScenarioConfig small_scenario(int users, int horizon, double duration) {
  ScenarioConfig cfg = preset("room2ap");
  cfg.users = users;
  cfg.horizon = horizon;
  cfg.duration_s = duration;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("stationary users keep a constant assignment") {
  ScenarioConfig cfg = small_scenario(3, 1, 3.0);
  cfg.mobility = {0.0, 0.0, 0.0, 0.0};  // parked walkers
  const RunResult result = run(cfg);
  REQUIRE(result.records.size() == 10);
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    CHECK(result.records[i].handovers == 0);
    CHECK(result.assignment_history[i] == result.assignment_history[1]);
  }
}

TEST_CASE("single user switches once at the midline") {
  ScenarioConfig cfg = small_scenario(1, 1, 11.7);
  cfg.eta0 = 1.0;  // no handover penalty: the solver reduces to a rate argmax
  cfg.mobility = {0.5, 0.5, 0.0, 0.0};
  UserState walker;
  walker.position = {0.95, 2.0};
  walker.waypoint = {7.9, 2.0};
  walker.speed = 0.5;
  const RunResult result = run(cfg, {walker});
  CHECK(handover_count(result.assignment_history) == 1);
  // per-step scalar rate comparison as the reference
  int expected_switch_step = -1;
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const double x = 0.95 + 0.5 * 0.3 * static_cast<double>(k + 1);
    const double r0 = achievable_rate({x, 2.0}, 0, cfg.aps);
    const double r1 = achievable_rate({x, 2.0}, 1, cfg.aps);
    if (r1 > r0) {
      expected_switch_step = static_cast<int>(k);
      break;
    }
  }
  REQUIRE(expected_switch_step > 0);
  CHECK(result.assignment_history[static_cast<std::size_t>(expected_switch_step) - 1][0] == 0);
  CHECK(result.assignment_history[static_cast<std::size_t>(expected_switch_step)][0] == 1);
}

TEST_CASE("identical configs give identical metric streams") {
  const ScenarioConfig cfg = small_scenario(5, 2, 6.0);
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].throughput_bps == b.records[i].throughput_bps);
    CHECK(a.records[i].objective == b.records[i].objective);
    CHECK(a.records[i].handovers == b.records[i].handovers);
  }
  CHECK(a.assignment_history == b.assignment_history);
}

TEST_CASE("perfect prediction makes the realized rate match the solver") {
  // One manual service step with ground-truth future positions.
  ScenarioConfig cfg = small_scenario(3, 2, 0.3);
  cfg.prediction_mode = PredictionMode::OraclePositions;
  auto users = rwp_init(cfg.room, cfg.mobility, cfg.users, cfg.seed);
  std::vector<Rng> rngs;
  for (std::size_t u = 0; u < users.size(); ++u) rngs.emplace_back(mix_seed(cfg.seed, u + 1));

  std::vector<PositionFrame> frames(2, PositionFrame(users.size()));
  for (std::size_t u = 0; u < users.size(); ++u) {
    UserState ghost = users[u];
    Rng ghost_rng = rngs[u];
    for (int t = 0; t < 2; ++t) {
      rwp_step(ghost, cfg.tau_p_s, cfg.room, cfg.mobility, ghost_rng);
      frames[static_cast<std::size_t>(t)][u] = ghost.position;
    }
  }
  ProblemInstance inst;
  inst.rates = rate_tensor(frames, cfg.aps, 2);
  inst.prev_ap = {0, 0, 1};
  inst.eta0 = cfg.eta0;
  inst.beta = cfg.beta;
  inst.horizon = 2;
  const auto sol = solve(inst, cfg.solver);

  for (std::size_t u = 0; u < users.size(); ++u)
    rwp_step(users[u], cfg.tau_p_s, cfg.room, cfg.mobility, rngs[u]);

  for (std::size_t u = 0; u < users.size(); ++u) {
    const int a = sol.plan[0][u];
    const bool kept = inst.prev_ap[u] == a;
    const double realized =
        realized_rate(users[u].position, a, sol.p1(static_cast<Eigen::Index>(u), a), kept,
                      cfg.aps, cfg.eta0);
    const double from_solver =
        sol.p1(static_cast<Eigen::Index>(u), a) * sol.r1(static_cast<Eigen::Index>(u), a);
    CHECK(realized == doctest::Approx(from_solver).epsilon(1e-12));
  }
}

TEST_CASE("realized rate applies the handover factor") {
  const ScenarioConfig cfg = small_scenario(1, 1, 0.3);
  const Vec2 pos{3.0, 2.0};
  const double kept = realized_rate(pos, 0, 1.0, true, cfg.aps, 0.75);
  const double moved = realized_rate(pos, 0, 1.0, false, cfg.aps, 0.75);
  CHECK(moved == doctest::Approx(0.75 * kept).epsilon(1e-15));
}

TEST_CASE("handover count bookkeeping") {
  CHECK(handover_count({{0, 1}, {0, 1}, {0, 1}}) == 0);
  std::vector<std::vector<int>> alternating;
  for (int i = 0; i < 10; ++i) alternating.push_back({i % 2});
  CHECK(handover_count(alternating) == 9);

  const ScenarioConfig cfg = small_scenario(4, 1, 6.0);
  const RunResult result = run(cfg);
  int from_records = 0;
  for (std::size_t i = 1; i < result.records.size(); ++i)
    from_records += result.records[i].handovers;
  CHECK(handover_count(result.assignment_history) == from_records);
}

TEST_CASE("total objective") {
  MetricsRecord a, b;
  a.objective = -2.0;
  b.objective = -3.5;
  CHECK(total_objective({a, b}) == doctest::Approx(-5.5).epsilon(1e-15));
}

TEST_CASE("closed-loop MVR tracks the exhaustive run within 5 percent") {
  ScenarioConfig cfg = small_scenario(3, 1, 60.0);
  cfg.seed = 2;
  const RunResult mvr = run(cfg);
  cfg.algorithm = Algorithm::Exhaustive;
  const RunResult exact = run(cfg);
  const double u_mvr = total_objective(mvr.records);
  const double u_exact = total_objective(exact.records);
  CHECK(std::abs(u_mvr - u_exact) / std::abs(u_exact) <= 0.05);
}

TEST_CASE("two-zone strategy table") {
  const double r = 4e8;
  const IntuitionResult table = intuition_strategy_rates(r, 0.75);
  CHECK(table.first_step[0] == doctest::Approx(0.5 * r).epsilon(1e-15));
  CHECK(table.second_step[0] == doctest::Approx(1.5 * r).epsilon(1e-15));
  CHECK(table.average[0] == doctest::Approx(1.0 * r).epsilon(1e-15));
  CHECK(table.average[1] == doctest::Approx(1.3125 * r).epsilon(1e-15));
  CHECK(table.average[2] == doctest::Approx(1.375 * r).epsilon(1e-15));
  CHECK(table.best == 2);  // both handovers first

  // the margin closes as eta0 approaches 1
  const IntuitionResult no_penalty = intuition_strategy_rates(r, 1.0);
  CHECK(no_penalty.average[1] == doctest::Approx(no_penalty.average[2]).epsilon(1e-15));
}

TEST_CASE("oracle compare enforces the per-step enumeration cap") {
  ScenarioConfig cfg = small_scenario(3, 2, 3.0);
  cfg.enumeration_cap = 10.0;  // 2^(3*2) = 64 exceeds this
  CHECK_THROWS_AS(oracle_compare(cfg), std::invalid_argument);
}
