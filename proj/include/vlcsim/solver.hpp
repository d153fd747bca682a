#pragma once

#include "vlcsim/problem.hpp"

#include <cstdint>
#include <string>

namespace vlcsim {

/// Relaxed primal point: x in [0,1], p in [p_floor, 1], r >= 0 per
/// (t, user, ap). r at t = 1 is the fixed effective rate, not a variable.
struct RelaxedPrimal {
  std::vector<ArrayXXd> x, p, r;  // index t-1, each users x aps
  bool degenerate = false;        // some (t, ap) had all-negative share numerators

  const ArrayXXd& x_at(int t) const { return x[static_cast<std::size_t>(t - 1)]; }
  const ArrayXXd& p_at(int t) const { return p[static_cast<std::size_t>(t - 1)]; }
  const ArrayXXd& r_at(int t) const { return r[static_cast<std::size_t>(t - 1)]; }
};

enum class StepSchedule { Constant, InvSqrt };

struct SolverConfig {
  int max_iterations = 2000;
  double step0 = 1.0;              // epsilon for lambda and zeta
  double gamma_step_ratio = 0.01;  // epsilon_gamma = ratio * epsilon
  StepSchedule schedule = StepSchedule::Constant;
  double tolerance = 1e-7;    // max multiplier change declaring convergence
  double p_floor = 1e-6;      // lower clamp for p
  double lambda_floor = 1e-9; // floor applied to lambda in divisions
  double x_floor = 1e-12;     // x below this contributes nothing to the objective
  double gamma_floor = 1e-12; // |gamma| floor in the r* denominator
  double rate_scale_hz = 0.0; // 0: rescale by the largest rate entry
  int trace_stride = 0;       // record diagnostics every n iterations; 0: off
  std::string trace_csv;      // dump the iteration trace here when non-empty

  void validate() const;
};

/// Relaxed objective sum_{t,u,a} x^(2b-1) / (r p)^(b-1); terms with
/// x <= x_floor contribute 0.
double relaxed_objective(const RelaxedPrimal& primal, double beta, double x_floor = 1e-12);

/// Closed-form primal point for fixed multipliers: p* from the stationarity
/// of the Lagrangian, r* for t >= 2 (fixed effective rate at t = 1), then x*;
/// each clamped into its box.
RelaxedPrimal primal_update(const ProblemInstance& inst, const MultiplierSet& mult,
                            const SolverConfig& cfg);

/// Projected gradient-ascent step on all multipliers. Returns the largest
/// absolute multiplier change.
double dual_step(const ProblemInstance& inst, const RelaxedPrimal& primal,
                 MultiplierSet& mult, int iteration, const SolverConfig& cfg);

/// Argmax recovery of a binary assignment from a relaxed x slice. Ties break
/// to the lowest AP index; an all-zero row falls back to the user's entry in
/// `fallback`.
std::vector<int> recover_assignment(const ArrayXXd& x_slice, const std::vector<int>& fallback);

/// Rescales shares so every AP with assigned users hands out exactly all of
/// its resource; unassigned pairs are zeroed. A zero-sum group gets equal
/// shares.
void normalize_allocation(ArrayXXd& p_slice, const std::vector<int>& assignment);

/// Full MVR run: iterate primal/dual until the multiplier change drops below
/// tolerance or max_iterations is hit, then recover and normalize the t = 1
/// slice. Internally rescales rates to dimensionless units.
AllocationSolution solve(const ProblemInstance& inst, const SolverConfig& cfg);

enum class Curvature { Convex, Concave, Neither };
const char* to_string(Curvature c);

/// Analytic principal-minor test for f(x,y,z) = x^a y^b z^c on the positive
/// orthant. A linear monomial (zero Hessian) reports Convex.
Curvature check_monomial_convexity(double a, double b, double c);

struct HessianWitness {
  bool definite = false;            // semi-definite of the requested sign at all samples
  double worst_relative_eig = 0.0;  // most-violating eigenvalue / ||H||_2
  Eigen::Vector3d worst_point{0.0, 0.0, 0.0};
  long first_violation = -1;        // sample index of the first violation, -1 if none
};

/// Finite-difference Hessians of x^a y^b z^c sampled uniformly in
/// [0.1, 10]^3; checks positive (Convex) or negative (Concave)
/// semi-definiteness with a 1e-8 * ||H|| eigenvalue tolerance. The check
/// runs on the diagonally-scaled (congruent) Hessian, which has the same
/// definiteness verdict and uniform difference noise.
HessianWitness numeric_hessian_witness(double a, double b, double c, int samples,
                                       std::uint64_t seed,
                                       Curvature side = Curvature::Convex);

}  // namespace vlcsim
