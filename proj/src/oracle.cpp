#include "vlcsim/oracle.hpp"

#include "vlcsim/fairness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vlcsim {

void ProblemInstance::validate() const {
  rates.validate();
  if (horizon != rates.horizon())
    throw std::invalid_argument("instance: horizon does not match the rate tensor");
  if (!(beta > 1.0)) throw std::invalid_argument("instance: beta must be > 1");
  if (!(eta0 > 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("instance: eta0 must be in (0, 1]");
  if (static_cast<int>(prev_ap.size()) != users())
    throw std::invalid_argument("instance: previous assignment size mismatch");
  for (int ap : prev_ap)
    if (ap < 0 || ap >= aps())
      throw std::invalid_argument("instance: previous assignment AP out of range");
}

double ProblemInstance::effective_rate1(int user, int ap) const {
  const double x0 = prev_ap[static_cast<std::size_t>(user)] == ap ? 1.0 : 0.0;
  return ((1.0 - eta0) * x0 + eta0) * rates.at(1)(user, ap);
}

double assignment_count(int users, int aps, int horizon) {
  return std::pow(static_cast<double>(aps), static_cast<double>(users) * horizon);
}

AssignmentEnumerator::AssignmentEnumerator(int users, int aps, int horizon, double cap)
    : users_(users), aps_(aps), horizon_(horizon) {
  if (users < 1 || aps < 1 || horizon < 1)
    throw std::invalid_argument("enumerator: users, aps and horizon must be >= 1");
  total_ = assignment_count(users, aps, horizon);
  if (total_ > cap)
    throw std::invalid_argument("enumerator: instance size " + std::to_string(total_) +
                                " exceeds the enumeration cap " + std::to_string(cap));
  digits_.assign(static_cast<std::size_t>(users) * static_cast<std::size_t>(horizon), 0);
}

bool AssignmentEnumerator::next(FeasibleAssignment& out) {
  if (done_) return false;
  if (!first_) {
    // odometer increment, last digit fastest: lexicographic ascending order
    int i = static_cast<int>(digits_.size()) - 1;
    while (i >= 0) {
      if (++digits_[static_cast<std::size_t>(i)] < aps_) break;
      digits_[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) {
      done_ = true;
      return false;
    }
  }
  first_ = false;
  out.ap_of.assign(static_cast<std::size_t>(horizon_),
                   std::vector<int>(static_cast<std::size_t>(users_)));
  for (int t = 0; t < horizon_; ++t)
    for (int u = 0; u < users_; ++u)
      out.ap_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(u)] =
          digits_[static_cast<std::size_t>(t) * static_cast<std::size_t>(users_) +
                  static_cast<std::size_t>(u)];
  return true;
}

std::vector<ArrayXd> effective_rates(const FeasibleAssignment& x,
                                     const ProblemInstance& inst) {
  const int users = inst.users();
  std::vector<ArrayXd> r_hat(static_cast<std::size_t>(inst.horizon));
  for (int t = 1; t <= inst.horizon; ++t) {
    ArrayXd slice(users);
    for (int u = 0; u < users; ++u) {
      const int ap = x.ap_of[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(u)];
      const int prev = t == 1 ? inst.prev_ap[static_cast<std::size_t>(u)]
                              : x.ap_of[static_cast<std::size_t>(t - 2)][static_cast<std::size_t>(u)];
      const double eta = prev == ap ? 1.0 : inst.eta0;
      slice(u) = eta * inst.rates.at(t)(u, ap);
    }
    r_hat[static_cast<std::size_t>(t - 1)] = std::move(slice);
  }
  return r_hat;
}

std::vector<ArrayXd> per_assignment_allocation(const FeasibleAssignment& x,
                                               const ProblemInstance& inst) {
  const int users = inst.users();
  const int aps = inst.aps();
  const auto r_hat = effective_rates(x, inst);
  const double exponent = 1.0 / inst.beta - 1.0;

  std::vector<ArrayXd> shares(static_cast<std::size_t>(inst.horizon), ArrayXd::Zero(users));
  std::vector<int> members;
  for (int t = 1; t <= inst.horizon; ++t) {
    const auto& r = r_hat[static_cast<std::size_t>(t - 1)];
    auto& p = shares[static_cast<std::size_t>(t - 1)];
    for (int a = 0; a < aps; ++a) {
      members.clear();
      bool dead_rate = false;
      for (int u = 0; u < users; ++u)
        if (x.ap_of[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(u)] == a) {
          members.push_back(u);
          if (!(r(u) > 0.0)) dead_rate = true;
        }
      if (members.empty()) continue;  // AP serves nobody at this step
      if (dead_rate) {
        // A zero effective rate makes the group's utility -inf regardless of
        // the split; hand out equal shares to keep the output well formed.
        for (int u : members) p(u) = 1.0 / static_cast<double>(members.size());
        continue;
      }
      double weight_sum = 0.0;
      for (int u : members) weight_sum += std::pow(r(u), exponent);
      for (int u : members) p(u) = std::pow(r(u), exponent) / weight_sum;
    }
  }
  return shares;
}

double assignment_utility(const FeasibleAssignment& x,
                          const std::vector<ArrayXd>& shares,
                          const ProblemInstance& inst) {
  const auto r_hat = effective_rates(x, inst);
  double utility = 0.0;
  for (int t = 1; t <= inst.horizon; ++t) {
    const auto& r = r_hat[static_cast<std::size_t>(t - 1)];
    const auto& p = shares[static_cast<std::size_t>(t - 1)];
    for (int u = 0; u < inst.users(); ++u) {
      const double rate = p(u) * r(u);
      if (!(rate > 0.0)) return -std::numeric_limits<double>::infinity();
      utility += psi(rate, inst.beta);
    }
  }
  return utility;
}

AllocationSolution exhaustive_solve(const ProblemInstance& inst, double cap) {
  inst.validate();
  AssignmentEnumerator enumerate(inst.users(), inst.aps(), inst.horizon, cap);

  FeasibleAssignment candidate;
  FeasibleAssignment best;
  std::vector<ArrayXd> best_shares;
  double best_utility = -std::numeric_limits<double>::infinity();
  long evaluated = 0;
  while (enumerate.next(candidate)) {
    ++evaluated;
    const auto shares = per_assignment_allocation(candidate, inst);
    const double utility = assignment_utility(candidate, shares, inst);
    if (utility > best_utility) {  // strict: keeps the lexicographically smallest
      best_utility = utility;
      best = candidate;
      best_shares = shares;
    }
  }

  const int users = inst.users();
  const int aps = inst.aps();
  AllocationSolution sol;
  sol.plan = best.ap_of;
  sol.utility = best_utility;
  sol.x1 = ArrayXXd::Zero(users, aps);
  sol.p1 = ArrayXXd::Zero(users, aps);
  sol.r1 = ArrayXXd::Zero(users, aps);
  for (int u = 0; u < users; ++u)
    for (int a = 0; a < aps; ++a) sol.r1(u, a) = inst.effective_rate1(u, a);
  for (int u = 0; u < users; ++u) {
    const int a = best.ap_of[0][static_cast<std::size_t>(u)];
    sol.x1(u, a) = 1.0;
    sol.p1(u, a) = best_shares[0](u);
  }
  sol.diag.iterations = evaluated;
  sol.diag.converged = true;
  return sol;
}

}  // namespace vlcsim
