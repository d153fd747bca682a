#pragma once

#include "vlcsim/mobility.hpp"
#include "vlcsim/solver.hpp"

#include <string>
#include <vector>

namespace vlcsim::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Literal evaluation of the full Lagrangian of the relaxed problem: the
/// objective plus every multiplier term, written as plain sums. Used as the
/// independent reference the closed-form updates are differenced against.
double lagrangian_value(const ProblemInstance& inst, const RelaxedPrimal& primal,
                        const MultiplierSet& mult);

enum class Var { X, P, R };

/// The Lagrangian terms containing the (t, user, ap) coordinate of the given
/// variable. Differencing this restriction equals differencing the full
/// Lagrangian (the dropped terms are constants in that coordinate) but is
/// free of their cancellation noise.
double lagrangian_terms(const ProblemInstance& inst, const RelaxedPrimal& primal,
                        const MultiplierSet& mult, Var v, int t, int user, int ap);

struct KktReport {
  long coords_checked = 0;
  long instances = 0;
  double worst_residual = 0.0;  // relative to the derivative's term scale
  bool pass = false;
};

/// Draws random instances and multiplier sets, runs the closed-form primal
/// update, and checks the three stationarity equations by central finite
/// differences of the Lagrangian at every unclamped coordinate.
KktReport kkt_residual_suite(int instances, std::uint64_t seed, double tol = 1e-6);

/// Analytic curvature verdicts vs finite-difference Hessian sampling on a
/// grid straddling the convexity boundaries a = beta (t = 1 form) and
/// a = 2 beta - 1 (t > 1 form), for both the convex and the concave regime.
std::vector<CheckResult> convexity_grid(int samples_per_case, std::uint64_t seed);

/// Stationary-distribution histogram agreement, Monte Carlo mean leg length,
/// and the empirical misprediction frequency under the service-time bound.
std::vector<CheckResult> mobility_checks(bool quick, std::uint64_t seed);

std::vector<CheckResult> run_all(bool quick, std::uint64_t seed);

}  // namespace vlcsim::verify
