#include "vlcsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace vlcsim::verify {

namespace {

std::string format(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

}  // namespace

double lagrangian_value(const ProblemInstance& inst, const RelaxedPrimal& primal,
                        const MultiplierSet& mult) {
  const double beta = inst.beta;
  double value = 0.0;
  for (int t = 1; t <= inst.horizon; ++t) {
    const std::size_t s = static_cast<std::size_t>(t - 1);
    for (int u = 0; u < inst.users(); ++u)
      for (int a = 0; a < inst.aps(); ++a) {
        const double x = primal.x[s](u, a);
        const double p = primal.p[s](u, a);
        const double r = primal.r[s](u, a);
        value += std::pow(x, 2.0 * beta - 1.0) / std::pow(r * p, beta - 1.0);
        value += mult.lambda(t - 1, a) * x * p;
        value += mult.zeta(t - 1, u) * x;
        if (t >= 2) {
          const double x_prev = primal.x[s - 1](u, a);
          value += mult.gamma_at(t)(u, a) *
                   (r - ((1.0 - inst.eta0) * x_prev + inst.eta0) * inst.rates.at(t)(u, a));
        }
      }
    for (int a = 0; a < inst.aps(); ++a) value -= mult.lambda(t - 1, a);
    for (int u = 0; u < inst.users(); ++u) value -= mult.zeta(t - 1, u);
  }
  return value;
}

namespace {

double& coordinate(RelaxedPrimal& primal, Var v, int t, int u, int a) {
  const std::size_t s = static_cast<std::size_t>(t - 1);
  switch (v) {
    case Var::X: return primal.x[s](u, a);
    case Var::P: return primal.p[s](u, a);
    default: return primal.r[s](u, a);
  }
}

}  // namespace

double lagrangian_terms(const ProblemInstance& inst, const RelaxedPrimal& primal,
                        const MultiplierSet& mult, Var v, int t, int u, int a) {
  const double beta = inst.beta;
  const std::size_t s = static_cast<std::size_t>(t - 1);
  const double x = primal.x[s](u, a);
  const double p = primal.p[s](u, a);
  const double r = primal.r[s](u, a);
  double value = std::pow(x, 2.0 * beta - 1.0) / std::pow(r * p, beta - 1.0);
  switch (v) {
    case Var::X:
      value += mult.lambda(t - 1, a) * x * p + mult.zeta(t - 1, u) * x;
      if (t < inst.horizon)
        value -= mult.gamma_at(t + 1)(u, a) * (1.0 - inst.eta0) *
                 inst.rates.at(t + 1)(u, a) * x;
      break;
    case Var::P:
      value += mult.lambda(t - 1, a) * x * p;
      break;
    default:
      value += mult.gamma_at(t)(u, a) * r;
      break;
  }
  return value;
}

namespace {

double fd_partial(const ProblemInstance& inst, const RelaxedPrimal& primal,
                  const MultiplierSet& mult, Var v, int t, int u, int a) {
  RelaxedPrimal probe = primal;
  double& slot = coordinate(probe, v, t, u, a);
  const double base = slot;
  const double h = 1e-6 * std::max(std::abs(base), 1e-3);
  slot = base + h;
  const double up = lagrangian_terms(inst, probe, mult, v, t, u, a);
  slot = base - h;
  const double down = lagrangian_terms(inst, probe, mult, v, t, u, a);
  slot = base;
  return (up - down) / (2.0 * h);
}

// Magnitude scale of the analytic partial: the sum of |term| of the
// stationarity equation, so the relative residual is well defined near 0.
double partial_scale(const ProblemInstance& inst, const RelaxedPrimal& primal,
                     const MultiplierSet& mult, Var v, int t, int u, int a) {
  const double beta = inst.beta;
  const std::size_t s = static_cast<std::size_t>(t - 1);
  const double x = primal.x[s](u, a);
  const double p = primal.p[s](u, a);
  const double r = primal.r[s](u, a);
  switch (v) {
    case Var::X: {
      double scale = std::abs((2.0 * beta - 1.0) * std::pow(x, 2.0 * beta - 2.0) /
                              std::pow(r * p, beta - 1.0));
      scale += std::abs(mult.lambda(t - 1, a) * p) + std::abs(mult.zeta(t - 1, u));
      if (t < inst.horizon)
        scale += std::abs(mult.gamma_at(t + 1)(u, a) * (1.0 - inst.eta0) *
                          inst.rates.at(t + 1)(u, a));
      return scale;
    }
    case Var::P:
      return std::abs((beta - 1.0) * std::pow(x, 2.0 * beta - 1.0) /
                      (std::pow(r, beta - 1.0) * std::pow(p, beta))) +
             std::abs(mult.lambda(t - 1, a) * x);
    default:
      return std::abs((beta - 1.0) * std::pow(x, 2.0 * beta - 1.0) /
                      (std::pow(r, beta) * std::pow(p, beta - 1.0))) +
             std::abs(mult.gamma_at(t)(u, a));
  }
}

}  // namespace

KktReport kkt_residual_suite(int instances, std::uint64_t seed, double tol) {
  Rng rng(mix_seed(seed, 0x4B4B));
  const double betas[] = {1.5, 2.0, 3.0};
  SolverConfig cfg;  // floors and clamps at their defaults

  KktReport report;
  report.pass = true;
  for (int k = 0; k < instances; ++k) {
    const int users = 1 + static_cast<int>(rng() % 3);
    const int aps = 1 + static_cast<int>(rng() % 3);
    const int horizon = 1 + static_cast<int>(rng() % 3);

    ProblemInstance inst;
    inst.beta = betas[k % 3];
    inst.eta0 = 0.5 + 0.5 * uniform01(rng);
    inst.horizon = horizon;
    inst.rates.slices.assign(static_cast<std::size_t>(horizon), ArrayXXd::Zero(users, aps));
    for (auto& slice : inst.rates.slices)
      for (int u = 0; u < users; ++u)
        for (int a = 0; a < aps; ++a) slice(u, a) = 0.5 + 9.5 * uniform01(rng);
    inst.prev_ap.resize(static_cast<std::size_t>(users));
    for (auto& ap : inst.prev_ap) ap = static_cast<int>(rng() % static_cast<unsigned>(aps));

    const double gamma_scale = (inst.beta - 1.0) / std::pow(5.0, inst.beta);
    MultiplierSet mult = MultiplierSet::init(users, aps, horizon, 1.0, 0.0, gamma_scale);
    for (int t = 1; t <= horizon; ++t) {
      for (int a = 0; a < aps; ++a)
        mult.lambda(t - 1, a) = 0.2 * std::pow(25.0, uniform01(rng));
      if (t >= 2)
        for (int u = 0; u < users; ++u)
          for (int a = 0; a < aps; ++a)
            mult.gamma_at(t)(u, a) = gamma_scale * std::exp(2.0 * uniform01(rng) - 1.0);
      // Aim zeta so the share numerator lands interior for a reference AP.
      for (int u = 0; u < users; ++u) {
        const int a0 = static_cast<int>(rng() % static_cast<unsigned>(aps));
        const double target = 0.1 + 0.7 * uniform01(rng);
        const double future = t < horizon
                                  ? mult.gamma_at(t + 1)(u, a0) * (1.0 - inst.eta0) *
                                        inst.rates.at(t + 1)(u, a0)
                                  : 0.0;
        mult.zeta(t - 1, u) =
            future - target * mult.lambda(t - 1, a0) * (3.0 * inst.beta - 2.0) / (inst.beta - 1.0);
      }
    }

    const RelaxedPrimal primal = primal_update(inst, mult, cfg);
    ++report.instances;

    for (int t = 1; t <= horizon; ++t) {
      const std::size_t s = static_cast<std::size_t>(t - 1);
      for (int u = 0; u < users; ++u)
        for (int a = 0; a < aps; ++a) {
          const double p = primal.p[s](u, a);
          const double x = primal.x[s](u, a);
          if (!(p > cfg.p_floor * 1.01 && p < 0.999)) continue;  // clamped share
          if (!(x > 1e-9 && x < 0.999)) continue;                // clamped assignment
          for (Var v : {Var::X, Var::P, Var::R}) {
            if (v == Var::R && t == 1) continue;  // r^1 is not a variable
            const double fd = fd_partial(inst, primal, mult, v, t, u, a);
            const double scale = partial_scale(inst, primal, mult, v, t, u, a);
            const double residual = std::abs(fd) / std::max(scale, 1e-12);
            report.worst_residual = std::max(report.worst_residual, residual);
            if (residual > tol) report.pass = false;
            ++report.coords_checked;
          }
        }
    }
  }
  if (report.coords_checked < instances) report.pass = false;  // too few interior points
  return report;
}

std::vector<CheckResult> convexity_grid(int samples_per_case, std::uint64_t seed) {
  std::vector<CheckResult> results;
  auto run_case = [&](double beta, double a, double b, double c, Curvature side,
                      Curvature expected) {
    const Curvature analytic = check_monomial_convexity(a, b, c);
    const HessianWitness witness =
        numeric_hessian_witness(a, b, c, samples_per_case, seed, side);
    const bool witness_agrees = witness.definite == (analytic == side);
    const bool pass = analytic == expected && witness_agrees;
    results.push_back(
        {format("monomial beta=%.2f a=%.3f b=%.3f", beta, a, b) + " " + to_string(side),
         pass,
         std::string("analytic=") + to_string(analytic) +
             format(", witness worst eig=%.2e", witness.worst_relative_eig)});
  };

  for (double beta : {1.5, 2.0, 3.0}) {
    const double b = 1.0 - beta;
    run_case(beta, 2.0 * beta - 1.0, b, b, Curvature::Convex, Curvature::Convex);
    run_case(beta, 2.0 * beta - 1.0 + 0.5, b, b, Curvature::Convex, Curvature::Convex);
    run_case(beta, 2.0 * beta - 1.0 - 0.1, b, b, Curvature::Convex, Curvature::Neither);
    run_case(beta, beta, b, 0.0, Curvature::Convex, Curvature::Convex);
    run_case(beta, beta - 0.1, b, 0.0, Curvature::Convex, Curvature::Neither);
  }
  for (double beta : {0.6, 0.75, 0.9}) {
    const double b = 1.0 - beta;
    run_case(beta, 2.0 * beta - 1.0, b, b, Curvature::Concave, Curvature::Concave);
    run_case(beta, std::max(2.0 * beta - 1.0 - 0.05, 0.01), b, b, Curvature::Concave,
             Curvature::Concave);
    run_case(beta, 2.0 * beta - 1.0 + 0.1, b, b, Curvature::Concave, Curvature::Neither);
    run_case(beta, beta, b, 0.0, Curvature::Concave, Curvature::Concave);
    run_case(beta, beta + 0.1, b, 0.0, Curvature::Concave, Curvature::Neither);
  }
  return results;
}

std::vector<CheckResult> mobility_checks(bool quick, std::uint64_t seed) {
  std::vector<CheckResult> results;
  const Room unit{1.0, 1.0};

  // Monte Carlo mean leg length in the unit square.
  const std::int64_t samples = quick ? 1'000'000 : 10'000'000;
  const double mean_leg = expected_leg_length(unit, samples, seed);
  results.push_back({"mean leg length (unit square)",
                     std::abs(mean_leg - 0.52141) <= 0.005,
                     format("E[l]=%.5f, expected 0.52141 +- 0.005", mean_leg)});

  // Stationary init vs long-trajectory time average, 4x4 occupancy grid.
  {
    MobilityParams params{1.0, 1.0, 0.0, 0.0};  // fixed speed, no pause
    const int grid = 4;
    const int ensemble = quick ? 20'000 : 100'000;
    auto cell = [&](const Vec2& p) {
      const int cx = std::min(grid - 1, static_cast<int>(p.x() * grid));
      const int cy = std::min(grid - 1, static_cast<int>(p.y() * grid));
      return cy * grid + cx;
    };
    std::vector<double> hist_init(static_cast<std::size_t>(grid * grid), 0.0);
    const auto users = rwp_init(unit, params, ensemble, seed);
    for (const auto& u : users) hist_init[static_cast<std::size_t>(cell(u.position))] += 1.0;

    std::vector<double> hist_traj(static_cast<std::size_t>(grid * grid), 0.0);
    UserState walker = rwp_init(unit, params, 1, mix_seed(seed, 77))[0];
    Rng rng(mix_seed(seed, 78));
    const long traj_samples = quick ? 40'000 : 160'000;
    for (long i = 0; i < traj_samples; ++i) {
      rwp_step(walker, 0.6, unit, params, rng);  // ~one leg between samples
      hist_traj[static_cast<std::size_t>(cell(walker.position))] += 1.0;
    }

    double worst_sigma = 0.0;
    for (int i = 0; i < grid * grid; ++i) {
      const double p1 = hist_init[static_cast<std::size_t>(i)] / ensemble;
      const double p2 = hist_traj[static_cast<std::size_t>(i)] / static_cast<double>(traj_samples);
      const double pooled = 0.5 * (p1 + p2);
      const double sigma = std::sqrt(pooled * (1.0 - pooled) *
                                     (1.0 / ensemble + 1.0 / static_cast<double>(traj_samples)));
      worst_sigma = std::max(worst_sigma, std::abs(p1 - p2) / sigma);
    }
    const double corner = hist_init[0] / ensemble;
    const double center = hist_init[static_cast<std::size_t>(1 * grid + 1)] / ensemble;
    results.push_back({"stationary init vs trajectory time average",
                       worst_sigma <= 3.0 && corner < center,
                       format("worst cell deviation %.2f sigma, corner/center %.3f",
                              worst_sigma, corner / center)});
  }

  // Service-time bound keeps the empirical misprediction frequency near delta.
  {
    const double delta = 0.1;
    const int horizon = 3;
    MobilityParams params{0.1, 1.0, 0.0, 1.0};
    const double tau_p = service_time_bound(delta, horizon, params.v_min, params.v_max, mean_leg);
    const int trials = quick ? 20'000 : 100'000;
    const auto users = rwp_init(unit, params, trials, mix_seed(seed, 79));
    long stopped = 0;
    for (const auto& u : users) {
      const double remaining = (u.waypoint - u.position).norm();
      if (remaining <= u.speed * horizon * tau_p) ++stopped;
    }
    const double freq = static_cast<double>(stopped) / trials;
    results.push_back({"misprediction frequency under the service-time bound",
                       freq <= delta * 1.3,
                       format("tau_p=%.4f s, frequency %.4f <= %.3f", tau_p, freq, delta * 1.3)});
  }
  return results;
}

std::vector<CheckResult> run_all(bool quick, std::uint64_t seed) {
  std::vector<CheckResult> results = convexity_grid(quick ? 2000 : 10000, seed);
  const KktReport kkt = kkt_residual_suite(100, seed);
  results.push_back({"KKT stationarity residuals (100 instances)", kkt.pass,
                     format("%.0f coordinates, worst relative residual %.2e",
                            static_cast<double>(kkt.coords_checked), kkt.worst_residual)});
  auto mobility = mobility_checks(quick, seed);
  results.insert(results.end(), mobility.begin(), mobility.end());
  return results;
}

}  // namespace vlcsim::verify
