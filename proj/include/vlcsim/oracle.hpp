#pragma once

#include "vlcsim/problem.hpp"

namespace vlcsim {

inline constexpr double kDefaultEnumerationCap = 1e7;

/// A feasible assignment: exactly one AP per (service time, user).
struct FeasibleAssignment {
  std::vector<std::vector<int>> ap_of;  // [t-1][user]
};

/// |A|^(U*T) computed in floating point (may exceed integer range).
double assignment_count(int users, int aps, int horizon);

/// Streams every feasible assignment exactly once in lexicographic order of
/// the digit vector ((t=1,u=0), (t=1,u=1), ..., (t=T,u=U-1)). Construction
/// throws when the count exceeds the cap.
class AssignmentEnumerator {
 public:
  AssignmentEnumerator(int users, int aps, int horizon,
                       double cap = kDefaultEnumerationCap);
  bool next(FeasibleAssignment& out);
  double total() const { return total_; }

 private:
  int users_, aps_, horizon_;
  std::vector<int> digits_;  // t-major, user-minor
  bool first_ = true;
  bool done_ = false;
  double total_ = 0.0;
};

/// Effective rates along the assignment's handover chain:
/// r_hat[t-1][user] = ((1-eta0) [kept AP] + eta0) R^t, chained from x^0.
std::vector<ArrayXd> effective_rates(const FeasibleAssignment& x,
                                     const ProblemInstance& inst);

/// Closed-form optimal shares for a fixed assignment:
/// p = r_hat^(1/beta - 1) / sum over co-assigned users. Returns [t-1][user].
std::vector<ArrayXd> per_assignment_allocation(const FeasibleAssignment& x,
                                               const ProblemInstance& inst);

/// sum_{t,u} psi_beta(p * r_hat); -inf when an assigned rate is 0.
double assignment_utility(const FeasibleAssignment& x,
                          const std::vector<ArrayXd>& shares,
                          const ProblemInstance& inst);

/// Exhaustive search over all feasible assignments; ties break to the
/// lexicographically smallest optimal assignment.
AllocationSolution exhaustive_solve(const ProblemInstance& inst,
                                    double cap = kDefaultEnumerationCap);

}  // namespace vlcsim
