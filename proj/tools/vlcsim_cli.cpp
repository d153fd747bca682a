// Command-line front end: scenario runs, parameter sweeps, oracle
// comparisons and the verification suite. Exit codes: 0 success,
// 1 verification/acceptance failure, 2 usage or config errors.

#include "vlcsim/config.hpp"
#include "vlcsim/verify.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace vlcsim;

namespace {

struct ScenarioCli {
  std::string scenario = "room2ap";
  std::string config_path;
  std::string out_dir;
  std::optional<int> users;
  std::optional<int> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<double> beta, eta0, tau_p, duration;
  std::optional<std::string> algorithm, prediction_mode;
  std::optional<double> v_min, v_max, pause_min, pause_max;
  std::optional<int> solver_max_iterations, solver_trace_stride;
  std::optional<double> solver_step0, solver_tolerance, solver_gamma_ratio, solver_rate_scale;
  std::optional<std::string> solver_schedule;
  std::optional<double> enumeration_cap;
  std::optional<double> zone_rate;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "Preset: room2ap, room4ap, intuition")
        ->default_val(scenario);
    cmd->add_option("--config", config_path, "Scenario JSON file (overrides the preset)");
    cmd->add_option("--out", out_dir, "Output directory (default $VLCSIM_OUT or ./out)");
    cmd->add_option("--users", users, "Number of mobile users")->check(CLI::PositiveNumber);
    cmd->add_option("--T", horizon, "Prediction level (T >= 1)")->check(CLI::Range(1, 64));
    cmd->add_option("--seed", seed, "Master RNG seed");
    cmd->add_option("--beta", beta, "Fairness exponent (> 1)");
    cmd->add_option("--eta0", eta0, "Handover efficiency in (0, 1]");
    cmd->add_option("--tau-p", tau_p, "Service time (s)");
    cmd->add_option("--duration", duration, "Simulated time (s)");
    cmd->add_option("--algorithm", algorithm, "mvr | exhaustive");
    cmd->add_option("--prediction-mode", prediction_mode,
                    "two_fix_estimate | oracle_positions");
    cmd->add_option("--mobility.v_min", v_min, "Min user speed (m/s)");
    cmd->add_option("--mobility.v_max", v_max, "Max user speed (m/s)");
    cmd->add_option("--mobility.pause_min", pause_min, "Min pause (s)");
    cmd->add_option("--mobility.pause_max", pause_max, "Max pause (s)");
    cmd->add_option("--solver.max_iterations", solver_max_iterations);
    cmd->add_option("--solver.step0", solver_step0);
    cmd->add_option("--solver.tolerance", solver_tolerance);
    cmd->add_option("--solver.gamma_step_ratio", solver_gamma_ratio);
    cmd->add_option("--solver.schedule", solver_schedule, "constant | inv_sqrt");
    cmd->add_option("--solver.rate_scale_hz", solver_rate_scale);
    cmd->add_option("--solver.trace_stride", solver_trace_stride);
    cmd->add_option("--enumeration-cap", enumeration_cap);
    cmd->add_option("--zone-rate", zone_rate, "Inner-zone rate (bit/s) of the intuition preset");
  }

  ScenarioConfig resolve() const {
    ScenarioConfig cfg =
        config_path.empty() ? preset(scenario) : load_scenario_file(config_path);
    if (users) cfg.users = *users;
    if (horizon) cfg.horizon = *horizon;
    if (seed) cfg.seed = *seed;
    if (beta) cfg.beta = *beta;
    if (eta0) cfg.eta0 = *eta0;
    if (tau_p) cfg.tau_p_s = *tau_p;
    if (duration) cfg.duration_s = *duration;
    if (algorithm) cfg.algorithm = *algorithm == "exhaustive" ? Algorithm::Exhaustive
                                                              : Algorithm::Mvr;
    if (prediction_mode)
      cfg.prediction_mode = *prediction_mode == "oracle_positions"
                                ? PredictionMode::OraclePositions
                                : PredictionMode::TwoFixEstimate;
    if (v_min) cfg.mobility.v_min = *v_min;
    if (v_max) cfg.mobility.v_max = *v_max;
    if (pause_min) cfg.mobility.pause_min = *pause_min;
    if (pause_max) cfg.mobility.pause_max = *pause_max;
    if (solver_max_iterations) cfg.solver.max_iterations = *solver_max_iterations;
    if (solver_step0) cfg.solver.step0 = *solver_step0;
    if (solver_tolerance) cfg.solver.tolerance = *solver_tolerance;
    if (solver_gamma_ratio) cfg.solver.gamma_step_ratio = *solver_gamma_ratio;
    if (solver_schedule)
      cfg.solver.schedule = *solver_schedule == "inv_sqrt" ? StepSchedule::InvSqrt
                                                           : StepSchedule::Constant;
    if (solver_rate_scale) cfg.solver.rate_scale_hz = *solver_rate_scale;
    if (solver_trace_stride) cfg.solver.trace_stride = *solver_trace_stride;
    if (enumeration_cap) cfg.enumeration_cap = *enumeration_cap;
    if (zone_rate) cfg.intuition_zone_rate_bps = *zone_rate;
    cfg.validate();
    return cfg;
  }

  fs::path output_dir() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("VLCSIM_OUT")) return env;
    return "out";
  }
};

std::string run_stem(const ScenarioConfig& cfg) {
  std::ostringstream name;
  name << "run_" << cfg.name << "_u" << cfg.users << "_T" << cfg.horizon << "_s" << cfg.seed;
  return name.str();
}

int cmd_run(const ScenarioCli& cli, const std::string& trajectory_csv) {
  const ScenarioConfig cfg = cli.resolve();
  const fs::path out = cli.output_dir();
  fs::create_directories(out);

  if (cfg.name == "intuition") {
    const IntuitionResult table = intuition_strategy_rates(cfg.intuition_zone_rate_bps, cfg.eta0);
    const fs::path csv = out / "intuition_strategies.csv";
    std::ofstream f(csv);
    if (!f) throw std::runtime_error("cannot write '" + csv.string() + "'");
    f << "# config " << to_json(cfg).dump() << "\n";
    f << "# digest " << config_digest(cfg) << "\n";
    f << "strategy,handovers_first,handovers_second,rate_first_bps,rate_second_bps,average_bps\n";
    const char* labels[3] = {"both_late", "split", "both_early"};
    const int handovers_first[3] = {0, 1, 2};
    f.precision(17);
    for (int i = 0; i < 3; ++i)
      f << labels[i] << ',' << handovers_first[i] << ',' << 2 - handovers_first[i] << ','
        << table.first_step[i] << ',' << table.second_step[i] << ',' << table.average[i]
        << '\n';
    std::cout << "intuition: best strategy = " << labels[table.best]
              << " (two-step average " << table.average[table.best] / 1e6 << " Mb/s) -> "
              << csv.string() << "\n";
    return 0;
  }

  const RunResult result = run(cfg);
  const fs::path csv = out / (run_stem(cfg) + ".csv");
  const fs::path summary = out / (run_stem(cfg) + ".summary.json");
  write_metrics_csv(csv.string(), cfg, result);
  write_summary_json(summary.string(), cfg, result);
  if (!trajectory_csv.empty()) write_trajectory_csv(trajectory_csv, cfg, result);

  double mean_throughput = 0.0;
  for (const auto& rec : result.records) mean_throughput += rec.throughput_bps;
  mean_throughput /= static_cast<double>(result.records.size());
  std::cout << cfg.name << " users=" << cfg.users << " T=" << cfg.horizon
            << " seed=" << cfg.seed << ": steps=" << result.records.size()
            << " mean_throughput=" << mean_throughput / 1e6
            << " Mb/s total_objective=" << total_objective(result.records)
            << " handovers=" << handover_count(result.assignment_history) << " -> "
            << csv.string() << "\n";
  return 0;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto dash = token.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = std::stoull(token.substr(0, dash));
      const auto hi = std::stoull(token.substr(dash + 1));
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(std::stoull(token));
    }
  }
  return seeds;
}

int cmd_sweep(const ScenarioCli& cli, const std::vector<int>& user_axis,
              const std::vector<int>& horizon_axis, const std::string& seed_spec,
              int jobs) {
  const std::vector<std::uint64_t> seeds = parse_seed_list(seed_spec);
  if (user_axis.empty() || horizon_axis.empty() || seeds.empty())
    throw std::runtime_error("sweep: users, T and seeds axes must all be non-empty");
  const ScenarioConfig base = cli.resolve();
  const fs::path out = cli.output_dir();
  fs::create_directories(out);

  struct Job {
    ScenarioConfig cfg;
    std::string stem;
    bool ok = false;
    std::string error;
    double mean_throughput = 0.0, total_obj = 0.0, mean_wall = 0.0;
    int handovers = 0;
  };
  std::vector<Job> grid;
  for (int u : user_axis)
    for (int t : horizon_axis)
      for (auto s : seeds) {
        Job job;
        job.cfg = base;
        job.cfg.users = u;
        job.cfg.horizon = t;
        job.cfg.seed = s;
        job.stem = run_stem(job.cfg);
        grid.push_back(std::move(job));
      }

  std::atomic<std::size_t> cursor{0};
  std::mutex io;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= grid.size()) return;
      Job& job = grid[i];
      try {
        job.cfg.validate();
        const RunResult result = run(job.cfg);
        write_metrics_csv((out / (job.stem + ".csv")).string(), job.cfg, result);
        write_summary_json((out / (job.stem + ".summary.json")).string(), job.cfg, result);
        for (const auto& rec : result.records) {
          job.mean_throughput += rec.throughput_bps;
          job.mean_wall += rec.wall_time_s;
        }
        job.mean_throughput /= static_cast<double>(result.records.size());
        job.mean_wall /= static_cast<double>(result.records.size());
        job.total_obj = total_objective(result.records);
        job.handovers = handover_count(result.assignment_history);
        job.ok = true;
      } catch (const std::exception& e) {
        job.error = e.what();
        std::lock_guard lock(io);
        std::cerr << "sweep: " << job.stem << " failed: " << e.what() << "\n";
      }
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Per-run status manifest.
  {
    std::ofstream f(out / "runs.csv");
    f << "# config " << to_json(base).dump() << "\n";
    f << "users,T,seed,status,file\n";
    for (const auto& job : grid)
      f << job.cfg.users << ',' << job.cfg.horizon << ',' << job.cfg.seed << ','
        << (job.ok ? "ok" : "failed") << ',' << job.stem << ".csv\n";
  }

  // Aggregate over seeds for each (users, T) cell.
  std::ofstream f(out / "aggregate.csv");
  if (!f) throw std::runtime_error("cannot write aggregate.csv");
  f << "# config " << to_json(base).dump() << "\n";
  f << "users,T,mean_throughput_bps,mean_objective,total_handovers,mean_runtime_s,seeds_ok\n";
  f.precision(17);
  for (int u : user_axis)
    for (int t : horizon_axis) {
      double thr = 0.0, obj = 0.0, hand = 0.0, wall = 0.0;
      int ok = 0;
      for (const auto& job : grid)
        if (job.ok && job.cfg.users == u && job.cfg.horizon == t) {
          thr += job.mean_throughput;
          obj += job.total_obj;
          hand += job.handovers;
          wall += job.mean_wall;
          ++ok;
        }
      if (ok > 0) {
        thr /= ok;
        obj /= ok;
        hand /= ok;
        wall /= ok;
      }
      f << u << ',' << t << ',' << thr << ',' << obj << ',' << hand << ',' << wall << ','
        << ok << '\n';
    }
  std::cout << "sweep: " << grid.size() << " runs -> " << (out / "aggregate.csv").string()
            << "\n";
  for (const auto& job : grid)
    if (!job.ok) return 1;
  return 0;
}

int cmd_oracle_compare(const ScenarioCli& cli) {
  ScenarioConfig cfg = cli.resolve();
  const fs::path out = cli.output_dir();
  fs::create_directories(out);

  const OracleCompareResult result = oracle_compare(cfg);
  const fs::path csv = out / ("oracle_compare_" + run_stem(cfg).substr(4) + ".csv");
  std::ofstream f(csv);
  if (!f) throw std::runtime_error("cannot write '" + csv.string() + "'");
  f << "# config " << to_json(cfg).dump() << "\n";
  f << "instance_id,u_oracle,u_mvr,gap,enumerated_count,wall_oracle_s,wall_mvr_s\n";
  f.precision(17);
  for (const auto& row : result.rows)
    f << row.step << ',' << row.u_oracle << ',' << row.u_mvr << ',' << row.gap << ','
      << row.enumerated << ',' << row.wall_oracle_s << ',' << row.wall_mvr_s << '\n';

  std::cout << "oracle-compare: steps=" << result.rows.size()
            << " max_gap=" << result.max_gap << " total_gap=" << result.total_gap
            << " within_5pct=" << result.share_within(0.05) * 100.0 << "% -> "
            << csv.string() << "\n";
  return 0;
}

int cmd_verify(bool quick, std::uint64_t seed) {
  const auto results = verify::run_all(quick, seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES above\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobility-aware VLC downlink resource allocation simulator"};
  app.require_subcommand(1);

  ScenarioCli run_cli, sweep_cli, oracle_cli;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write metrics");
  run_cli.add_options(run_cmd);
  std::string trajectory_csv;
  run_cmd->add_option("--trajectory-csv", trajectory_csv,
                      "Also dump the ground-truth trajectories to this file");

  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian sweep over users x T x seeds");
  sweep_cli.add_options(sweep_cmd);
  std::vector<int> sweep_users{5, 10, 15};
  std::vector<int> sweep_T{1, 2, 3};
  std::string sweep_seeds = "1-10";
  int sweep_jobs = 1;
  sweep_cmd->add_option("--users-list", sweep_users, "User-count axis")->delimiter(',');
  sweep_cmd->add_option("--T-list", sweep_T, "Prediction-level axis")->delimiter(',');
  sweep_cmd->add_option("--seeds", sweep_seeds, "Seed list, e.g. 1,2,3 or 1-10");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* oracle_cmd =
      app.add_subcommand("oracle-compare", "Per-step MVR vs exhaustive-search gap");
  oracle_cli.add_options(oracle_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Convexity, KKT and mobility checks");
  bool quick = false;
  std::uint64_t verify_seed = 20240901;
  verify_cmd->add_flag("--quick", quick, "Reduced sample counts, same assertions");
  verify_cmd->add_option("--seed", verify_seed, "RNG seed for the checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_cli, trajectory_csv);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_cli, sweep_users, sweep_T, sweep_seeds, sweep_jobs);
    if (oracle_cmd->parsed()) return cmd_oracle_compare(oracle_cli);
    if (verify_cmd->parsed()) return cmd_verify(quick, verify_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
