#pragma once

#include "vlcsim/types.hpp"

namespace vlcsim {

/// One T-step look-ahead allocation problem: the predicted rate tensor, the
/// assignment committed at the previous service time, and the fairness /
/// handover parameters.
struct ProblemInstance {
  RateTensor rates;          // R[t](user, ap), bit/s (any consistent unit)
  std::vector<int> prev_ap;  // x^0: AP index each user was served by
  double eta0 = 0.75;        // average handover efficiency, (0, 1]
  double beta = 2.0;         // fairness exponent, > 1
  int horizon = 1;           // T >= 1

  int users() const { return rates.users(); }
  int aps() const { return rates.aps(); }
  void validate() const;

  /// Effective first-step rate ((1 - eta0) x0 + eta0) R^1 for a (user, ap).
  double effective_rate1(int user, int ap) const;
};

/// Lagrange multipliers of the relaxed problem. lambda (resource) and zeta
/// (assignment) are indexed (t-1, ap) / (t-1, user). gamma (rate definition)
/// is stored for 0 <= t <= T+1 with identically-zero slices outside 2..T, so
/// gamma^{t+1} lookups need no branching; gamma^1 is zero by definition.
struct MultiplierSet {
  ArrayXXd lambda;              // (T, aps), kept >= 0
  ArrayXXd zeta;                // (T, users)
  std::vector<ArrayXXd> gamma;  // size T+2, each users x aps

  static MultiplierSet init(int users, int aps, int horizon, double lambda0,
                            double zeta0, double gamma0);
  const ArrayXXd& gamma_at(int t) const { return gamma[static_cast<std::size_t>(t)]; }
  ArrayXXd& gamma_at(int t) { return gamma[static_cast<std::size_t>(t)]; }
};

struct SolveDiagnostics {
  long iterations = 0;
  bool converged = true;
  bool degenerate = false;  // persistent all-negative share numerators on some AP
  double final_max_multiplier_change = 0.0;
  double max_constraint_violation = 0.0;
  // sampled iteration trace, populated when tracing is on
  std::vector<long> trace_iteration;
  std::vector<double> trace_max_residual;   // max multiplier change that iteration
  std::vector<double> objective_trace;      // relaxed objective (scaled units)
};

/// A committed allocation: the binary plan over the horizon plus the t = 1
/// slice actually applied to the network.
struct AllocationSolution {
  std::vector<std::vector<int>> plan;  // plan[t-1][user]: AP index, t = 1..T
  ArrayXXd x1;                         // users x aps, binary
  ArrayXXd p1;                         // users x aps, shares (0 where unassigned)
  ArrayXXd r1;                         // users x aps, effective t = 1 rates (bit/s)
  double utility = 0.0;                // T-horizon utility of the plan
  MultiplierSet multipliers;           // final multipliers (dual solver only)
  SolveDiagnostics diag;
};

}  // namespace vlcsim
