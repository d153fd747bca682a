#include "vlcsim/solver.hpp"

#include "vlcsim/fairness.hpp"
#include "vlcsim/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace vlcsim {

MultiplierSet MultiplierSet::init(int users, int aps, int horizon, double lambda0,
                                  double zeta0, double gamma0) {
  MultiplierSet m;
  m.lambda = ArrayXXd::Constant(horizon, aps, lambda0);
  m.zeta = ArrayXXd::Constant(horizon, users, zeta0);
  m.gamma.assign(static_cast<std::size_t>(horizon) + 2, ArrayXXd::Zero(users, aps));
  for (int t = 2; t <= horizon; ++t) m.gamma_at(t).setConstant(gamma0);
  return m;
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
  if (!(step0 > 0.0)) throw std::invalid_argument("solver: step0 must be > 0");
  if (!(gamma_step_ratio > 0.0)) throw std::invalid_argument("solver: gamma_step_ratio must be > 0");
  if (!(tolerance > 0.0) || !(p_floor > 0.0) || !(lambda_floor > 0.0) ||
      !(x_floor > 0.0) || !(gamma_floor > 0.0))
    throw std::invalid_argument("solver: tolerance and floors must be > 0");
  if (rate_scale_hz < 0.0) throw std::invalid_argument("solver: rate_scale_hz must be >= 0");
}

double relaxed_objective(const RelaxedPrimal& primal, double beta, double x_floor) {
  if (!(beta > 1.0)) throw std::invalid_argument("relaxed_objective: beta must be > 1");
  double total = 0.0;
  for (std::size_t s = 0; s < primal.x.size(); ++s) {
    const auto& x = primal.x[s];
    const auto& p = primal.p[s];
    const auto& r = primal.r[s];
    for (Eigen::Index u = 0; u < x.rows(); ++u)
      for (Eigen::Index a = 0; a < x.cols(); ++a) {
        if (x(u, a) <= x_floor) continue;
        const double denom = std::max(r(u, a), 1e-300) * std::max(p(u, a), 1e-300);
        total += std::pow(x(u, a), 2.0 * beta - 1.0) / std::pow(denom, beta - 1.0);
      }
  }
  return total;
}

namespace {

struct StepSizes {
  double eps;        // lambda and zeta
  double eps_gamma;  // eps * ratio
};

StepSizes step_sizes(const SolverConfig& cfg, int iteration) {
  double eps = cfg.step0;
  if (cfg.schedule == StepSchedule::InvSqrt)
    eps /= std::sqrt(static_cast<double>(iteration));
  return {eps, eps * cfg.gamma_step_ratio};
}

// The joint closed forms (used when `conditional` is false) presume the share
// stationarity dL/dp = 0 holds with an interior p. Where p clamps (single-user
// and idle APs sit exactly there), that derivation breaks and x* ~ sqrt(lambda)
// inverts the attractiveness of lightly-loaded APs, which creates spurious
// crowding equilibria. The conditional update instead solves dL/dx = 0 (and
// dL/dr = 0 for t >= 2) at the clamped p; at interior-p coordinates both
// routes give identical values.
void update_primal(const ProblemInstance& inst, const MultiplierSet& mult,
                   const SolverConfig& cfg, RelaxedPrimal& out, bool conditional) {
  const int users = inst.users();
  const int aps = inst.aps();
  const int horizon = inst.horizon;
  const double beta = inst.beta;
  const double p_coef = (beta - 1.0) / (3.0 * beta - 2.0);
  const bool beta2 = beta == 2.0;
  // exponents of the closed forms
  const double e_r_lambda = (2.0 * beta - 1.0) / (beta - 1.0);
  const double e_r_p = (3.0 * beta - 2.0) / (beta - 1.0);
  const double r_denom_const = std::pow(beta - 1.0, 1.0 / (beta - 1.0));
  const double e_x = 1.0 / (2.0 * beta - 2.0);
  const double e_x_cond = beta / (beta - 1.0);

  ArrayXXd numerator(users, aps);
  out.degenerate = false;
  for (int t = 1; t <= horizon; ++t) {
    const std::size_t s = static_cast<std::size_t>(t - 1);
    auto& x = out.x[s];
    auto& p = out.p[s];
    auto& r = out.r[s];

    // p* = (b-1)/(3b-2) * (gamma^{t+1} (1-eta0) R^{t+1} - zeta^t) / lambda^t
    if (t < horizon)
      numerator = mult.gamma_at(t + 1) * ((1.0 - inst.eta0) * inst.rates.at(t + 1));
    else
      numerator.setZero();
    numerator.colwise() -= mult.zeta.row(t - 1).transpose().array();
    for (int a = 0; a < aps; ++a) {
      if ((numerator.col(a) < 0.0).all()) out.degenerate = true;
      p.col(a) = numerator.col(a) * p_coef /
                 std::max(mult.lambda(t - 1, a), cfg.lambda_floor);
    }
    p = p.max(cfg.p_floor).min(1.0);

    if (!conditional) {
      // r* (fixed effective rate at t = 1), then x* from the joint forms.
      if (t == 1) {
        for (int u = 0; u < users; ++u)
          for (int a = 0; a < aps; ++a) r(u, a) = inst.effective_rate1(u, a);
      } else {
        const ArrayXXd gamma2 = mult.gamma_at(t).abs().max(cfg.gamma_floor).square();
        for (int a = 0; a < aps; ++a) {
          const double l = std::max(mult.lambda(t - 1, a), cfg.lambda_floor);
          if (beta2)
            r.col(a) = (l * l * l) * p.col(a).square().square() / gamma2.col(a);
          else
            r.col(a) = std::pow(l, e_r_lambda) * p.col(a).pow(e_r_p) /
                       (r_denom_const * gamma2.col(a));
        }
      }
      for (int a = 0; a < aps; ++a) {
        const double l = std::max(mult.lambda(t - 1, a), cfg.lambda_floor);
        if (beta2)
          x.col(a) = (r.col(a) * p.col(a).square() * l).sqrt();
        else
          x.col(a) = (r.col(a).pow(beta - 1.0) * p.col(a).pow(beta) * l / (beta - 1.0))
                         .pow(e_x);
      }
      x = x.min(1.0).max(0.0);
      continue;
    }

    // Conditional route: dL/dx = 0 given the clamped p, with
    // A = gamma^{t+1}(1-eta0)R^{t+1} - zeta - lambda p.
    for (int a = 0; a < aps; ++a)
      numerator.col(a) -= std::max(mult.lambda(t - 1, a), cfg.lambda_floor) * p.col(a);
    numerator = numerator.max(0.0);

    if (t == 1) {
      for (int u = 0; u < users; ++u)
        for (int a = 0; a < aps; ++a) r(u, a) = inst.effective_rate1(u, a);
      // (2b-1) x^(2b-2) = A (r p)^(b-1)
      if (beta2)
        x = (numerator * r * p / 3.0).sqrt();
      else
        x = (numerator * (r * p).pow(beta - 1.0) / (2.0 * beta - 1.0)).pow(e_x);
    } else {
      // Solving dL/dx = 0 and dL/dr = 0 jointly at fixed p gives
      // x = (b-1) p (A/(2b-1))^(b/(b-1)) / gamma, then r from dL/dr = 0.
      const ArrayXXd gamma_f = mult.gamma_at(t).abs().max(cfg.gamma_floor);
      if (beta2)
        x = p * (numerator / 3.0).square() / gamma_f;
      else
        x = (beta - 1.0) * p * (numerator / (2.0 * beta - 1.0)).pow(e_x_cond) / gamma_f;
      x = x.min(1.0);
      // r = ((b-1) x^(2b-1) / (gamma p^(b-1)))^(1/b)
      if (beta2)
        r = (x.cube() / (gamma_f * p)).sqrt();
      else
        r = ((beta - 1.0) * x.pow(2.0 * beta - 1.0) / (gamma_f * p.pow(beta - 1.0)))
                .pow(1.0 / beta);
    }
    x = x.min(1.0).max(0.0);
  }
}

}  // namespace

RelaxedPrimal primal_update(const ProblemInstance& inst, const MultiplierSet& mult,
                            const SolverConfig& cfg) {
  const int users = inst.users();
  const int aps = inst.aps();
  RelaxedPrimal primal;
  primal.x.assign(static_cast<std::size_t>(inst.horizon), ArrayXXd::Zero(users, aps));
  primal.p = primal.x;
  primal.r = primal.x;
  update_primal(inst, mult, cfg, primal, /*conditional=*/false);
  return primal;
}

double dual_step(const ProblemInstance& inst, const RelaxedPrimal& primal,
                 MultiplierSet& mult, int iteration, const SolverConfig& cfg) {
  if (iteration < 1) throw std::invalid_argument("dual_step: iteration must be >= 1");
  const auto [eps, eps_gamma] = step_sizes(cfg, iteration);
  double max_change = 0.0;

  for (int t = 1; t <= inst.horizon; ++t) {
    const std::size_t s = static_cast<std::size_t>(t - 1);
    const auto& x = primal.x[s];
    const auto& p = primal.p[s];

    // lambda <- [lambda + eps (sum_u x p - 1)]+
    const ArrayXd load = (x * p).colwise().sum().transpose();
    for (int a = 0; a < inst.aps(); ++a) {
      const double old = mult.lambda(t - 1, a);
      const double updated = std::max(0.0, old + eps * (load(a) - 1.0));
      mult.lambda(t - 1, a) = updated;
      max_change = std::max(max_change, std::abs(updated - old));
    }

    // zeta <- zeta + eps (sum_a x - 1)
    const ArrayXd attach = x.rowwise().sum();
    for (int u = 0; u < inst.users(); ++u) {
      const double delta = eps * (attach(u) - 1.0);
      mult.zeta(t - 1, u) += delta;
      max_change = std::max(max_change, std::abs(delta));
    }

    // gamma <- gamma + eps_gamma (r - ((1-eta0) x^{t-1} + eta0) R^t), t >= 2
    if (t >= 2) {
      const auto& x_prev = primal.x[s - 1];
      const ArrayXXd residual =
          primal.r[s] -
          ((1.0 - inst.eta0) * x_prev + inst.eta0) * inst.rates.at(t);
      mult.gamma_at(t) += eps_gamma * residual;
      max_change = std::max(max_change, eps_gamma * residual.abs().maxCoeff());
    }
  }
  return max_change;
}

std::vector<int> recover_assignment(const ArrayXXd& x_slice, const std::vector<int>& fallback) {
  if (static_cast<std::size_t>(x_slice.rows()) != fallback.size())
    throw std::invalid_argument("recover_assignment: fallback size mismatch");
  std::vector<int> assignment(static_cast<std::size_t>(x_slice.rows()));
  for (Eigen::Index u = 0; u < x_slice.rows(); ++u) {
    int best = 0;
    double best_value = x_slice(u, 0);
    for (Eigen::Index a = 1; a < x_slice.cols(); ++a)
      if (x_slice(u, a) > best_value) {  // strict: ties keep the lowest index
        best_value = x_slice(u, a);
        best = static_cast<int>(a);
      }
    if (!std::isfinite(best_value))
      throw std::invalid_argument("recover_assignment: non-finite relaxed x");
    assignment[static_cast<std::size_t>(u)] =
        best_value > 0.0 ? best : fallback[static_cast<std::size_t>(u)];
  }
  return assignment;
}

void normalize_allocation(ArrayXXd& p_slice, const std::vector<int>& assignment) {
  const Eigen::Index users = p_slice.rows();
  const Eigen::Index aps = p_slice.cols();
  if (static_cast<std::size_t>(users) != assignment.size())
    throw std::invalid_argument("normalize_allocation: assignment size mismatch");
  ArrayXXd out = ArrayXXd::Zero(users, aps);
  for (Eigen::Index a = 0; a < aps; ++a) {
    double sum = 0.0;
    Eigen::Index members = 0;
    for (Eigen::Index u = 0; u < users; ++u)
      if (assignment[static_cast<std::size_t>(u)] == a) {
        sum += p_slice(u, a);
        ++members;
      }
    if (members == 0) continue;
    for (Eigen::Index u = 0; u < users; ++u) {
      if (assignment[static_cast<std::size_t>(u)] != a) continue;
      out(u, a) = sum > 0.0 ? p_slice(u, a) / sum
                            : 1.0 / static_cast<double>(members);
    }
  }
  p_slice = std::move(out);
}

AllocationSolution solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  inst.validate();
  cfg.validate();
  const int users = inst.users();
  const int aps = inst.aps();
  const int horizon = inst.horizon;
  const double beta = inst.beta;

  // Condition the exponentiations: work on dimensionless rates.
  double scale = cfg.rate_scale_hz;
  if (scale <= 0.0) {
    scale = 0.0;
    for (const auto& s : inst.rates.slices) scale = std::max(scale, s.maxCoeff());
    if (scale <= 0.0) scale = 1.0;
  }
  ProblemInstance scaled = inst;
  for (auto& s : scaled.rates.slices) s /= scale;

  // Scale-matched starting multipliers: near the KKT fixed point of a
  // balanced instance (x ~ 1, p ~ aps/users, r ~ typical serving rate).
  // Starting at the problem scale keeps lambda away from the projected-zero
  // region, where the interior closed forms lose their demand signal.
  double serving_rate = 0.0;
  for (const auto& s : scaled.rates.slices) serving_rate += s.rowwise().maxCoeff().mean();
  serving_rate /= static_cast<double>(horizon);
  if (!(serving_rate > 0.0)) serving_rate = 1.0;
  const double per_ap_load = std::max(1.0, static_cast<double>(users) / aps);
  const double lambda0 =
      (beta - 1.0) * std::pow(per_ap_load, beta) / std::pow(serving_rate, beta - 1.0);
  const double zeta0 = -(3.0 * beta - 2.0) * std::pow(per_ap_load, beta - 1.0) /
                       std::pow(serving_rate, beta - 1.0);
  const double gamma0 =
      (beta - 1.0) * std::pow(per_ap_load, beta - 1.0) / std::pow(serving_rate, beta);

  MultiplierSet mult = MultiplierSet::init(users, aps, horizon, lambda0, zeta0, gamma0);
  RelaxedPrimal primal;
  primal.x.assign(static_cast<std::size_t>(horizon), ArrayXXd::Zero(users, aps));
  primal.p = primal.x;
  primal.r = primal.x;

  SolveDiagnostics diag;
  const bool trace_on = cfg.trace_stride > 0 || !cfg.trace_csv.empty();
  const int stride = cfg.trace_stride > 0 ? cfg.trace_stride : 1;
  double change = std::numeric_limits<double>::infinity();
  int n = 0;
  while (n < cfg.max_iterations) {
    ++n;
    update_primal(scaled, mult, cfg, primal, /*conditional=*/true);
    change = dual_step(scaled, primal, mult, n, cfg);
    if (trace_on && (n % stride == 0 || n == 1)) {
      diag.trace_iteration.push_back(n);
      diag.trace_max_residual.push_back(change);
      diag.objective_trace.push_back(relaxed_objective(primal, beta, cfg.x_floor));
    }
    if (change < cfg.tolerance) break;
  }
  // Leave the primal consistent with the final multipliers.
  update_primal(scaled, mult, cfg, primal, /*conditional=*/true);

  diag.iterations = n;
  diag.converged = change < cfg.tolerance;
  diag.degenerate = primal.degenerate;
  diag.final_max_multiplier_change = change;
  for (int t = 1; t <= horizon; ++t) {
    const std::size_t s = static_cast<std::size_t>(t - 1);
    const double load = ((primal.x[s] * primal.p[s]).colwise().sum() - 1.0).maxCoeff();
    diag.max_constraint_violation = std::max(diag.max_constraint_violation, std::max(load, 0.0));
    const double attach = (primal.x[s].rowwise().sum() - 1.0).abs().maxCoeff();
    diag.max_constraint_violation = std::max(diag.max_constraint_violation, attach);
    if (t >= 2) {
      const ArrayXXd target =
          ((1.0 - inst.eta0) * primal.x[s - 1] + inst.eta0) * scaled.rates.at(t);
      diag.max_constraint_violation = std::max(
          diag.max_constraint_violation, (primal.r[s] - target).abs().maxCoeff());
    }
  }

  // Recover a binary plan over the whole horizon; the t = 1 slice is the one
  // committed to the network, later slices only feed the plan utility.
  AllocationSolution sol;
  sol.plan.resize(static_cast<std::size_t>(horizon));
  std::vector<int> fallback = inst.prev_ap;
  for (int t = 1; t <= horizon; ++t) {
    const std::size_t s = static_cast<std::size_t>(t - 1);
    sol.plan[s] = recover_assignment(primal.x[s], fallback);
    fallback = sol.plan[s];
  }

  // The relaxed optimum is an interior point, so users whose relaxed x is
  // nearly tied can round to the wrong AP, and a horizon plan can round the
  // handover timing wrongly. A post-convergence coordinate polish over users,
  // scored by the exact per-assignment utility, repairs those roundings at
  // the same |U| x |A|-flavored search cost the plain recovery already pays:
  // one user's trajectory is re-optimized exhaustively when A^T is small,
  // otherwise via single-slice and switch-at-t0 suffix moves.
  FeasibleAssignment plan{sol.plan};
  double best_utility = assignment_utility(plan, per_assignment_allocation(plan, inst), inst);
  const double per_user_count = std::pow(static_cast<double>(aps), horizon);
  for (int round = 0; round < users + 2; ++round) {
    bool improved = false;
    for (int u = 0; u < users; ++u) {
      const std::size_t uu = static_cast<std::size_t>(u);
      std::vector<int> best_traj(static_cast<std::size_t>(horizon));
      for (int t = 0; t < horizon; ++t)
        best_traj[static_cast<std::size_t>(t)] = plan.ap_of[static_cast<std::size_t>(t)][uu];
      auto consider = [&] {
        const double utility =
            assignment_utility(plan, per_assignment_allocation(plan, inst), inst);
        if (utility > best_utility) {
          best_utility = utility;
          for (int t = 0; t < horizon; ++t)
            best_traj[static_cast<std::size_t>(t)] = plan.ap_of[static_cast<std::size_t>(t)][uu];
          improved = true;
        }
      };
      if (per_user_count <= 32.0) {
        std::vector<int> digits(static_cast<std::size_t>(horizon), 0);
        for (;;) {
          for (int t = 0; t < horizon; ++t)
            plan.ap_of[static_cast<std::size_t>(t)][uu] = digits[static_cast<std::size_t>(t)];
          consider();
          int i = horizon - 1;
          while (i >= 0 && ++digits[static_cast<std::size_t>(i)] == aps)
            digits[static_cast<std::size_t>(i--)] = 0;
          if (i < 0) break;
        }
      } else {
        const std::vector<int> base = best_traj;
        for (int t0 = 0; t0 < horizon; ++t0)
          for (int a = 0; a < aps; ++a) {
            // single-slice move
            for (int t = 0; t < horizon; ++t)
              plan.ap_of[static_cast<std::size_t>(t)][uu] = base[static_cast<std::size_t>(t)];
            plan.ap_of[static_cast<std::size_t>(t0)][uu] = a;
            consider();
            // switch to a at t0 and stay
            for (int t = t0; t < horizon; ++t)
              plan.ap_of[static_cast<std::size_t>(t)][uu] = a;
            consider();
          }
      }
      for (int t = 0; t < horizon; ++t)
        plan.ap_of[static_cast<std::size_t>(t)][uu] = best_traj[static_cast<std::size_t>(t)];
    }
    // Pairwise swaps: two users exchanging APs in one slice never improves
    // through the single-user moves above when both intermediate states
    // overload an AP.
    for (int t = 0; t < horizon; ++t) {
      auto& slice = plan.ap_of[static_cast<std::size_t>(t)];
      for (int i = 0; i < users; ++i)
        for (int j = i + 1; j < users; ++j) {
          if (slice[static_cast<std::size_t>(i)] == slice[static_cast<std::size_t>(j)]) continue;
          std::swap(slice[static_cast<std::size_t>(i)], slice[static_cast<std::size_t>(j)]);
          const double utility =
              assignment_utility(plan, per_assignment_allocation(plan, inst), inst);
          if (utility > best_utility) {
            best_utility = utility;
            improved = true;
          } else {
            std::swap(slice[static_cast<std::size_t>(i)], slice[static_cast<std::size_t>(j)]);
          }
        }
    }
    if (!improved) break;
  }
  sol.plan = plan.ap_of;

  // Committed shares: the closed-form optimum for the final assignment (the
  // same share rule the per-assignment subproblem admits).
  const auto shares = per_assignment_allocation(plan, inst);
  sol.p1 = ArrayXXd::Zero(users, aps);
  for (int u = 0; u < users; ++u)
    sol.p1(u, sol.plan[0][static_cast<std::size_t>(u)]) = shares[0](u);

  sol.x1 = ArrayXXd::Zero(users, aps);
  for (int u = 0; u < users; ++u) sol.x1(u, sol.plan[0][static_cast<std::size_t>(u)]) = 1.0;
  sol.r1 = ArrayXXd::Zero(users, aps);
  for (int u = 0; u < users; ++u)
    for (int a = 0; a < aps; ++a) sol.r1(u, a) = inst.effective_rate1(u, a);

  sol.utility = best_utility;
  sol.multipliers = std::move(mult);
  if (!cfg.trace_csv.empty()) {
    std::ofstream trace(cfg.trace_csv);
    if (!trace) throw std::runtime_error("solver: cannot write trace '" + cfg.trace_csv + "'");
    trace << "iteration,max_residual,relaxed_objective\n";
    trace.precision(17);
    for (std::size_t i = 0; i < diag.trace_iteration.size(); ++i)
      trace << diag.trace_iteration[i] << ',' << diag.trace_max_residual[i] << ','
            << diag.objective_trace[i] << '\n';
  }
  sol.diag = std::move(diag);
  return sol;
}

const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::Convex: return "convex";
    case Curvature::Concave: return "concave";
    default: return "neither";
  }
}

Curvature check_monomial_convexity(double a, double b, double c) {
  // Principal minors of the Hessian of x^a y^b z^c on the positive orthant:
  // order 1 ~ a(a-1), order 2 ~ -ab(a+b-1), order 3 ~ abc(a+b+c-1).
  const double m1[3] = {a * (a - 1.0), b * (b - 1.0), c * (c - 1.0)};
  const double m2[3] = {a * b * (a + b - 1.0), a * c * (a + c - 1.0),
                        b * c * (b + c - 1.0)};
  const double m3 = a * b * c * (a + b + c - 1.0);

  const bool psd = m1[0] >= 0.0 && m1[1] >= 0.0 && m1[2] >= 0.0 &&
                   m2[0] <= 0.0 && m2[1] <= 0.0 && m2[2] <= 0.0 && m3 >= 0.0;
  const bool nsd = m1[0] <= 0.0 && m1[1] <= 0.0 && m1[2] <= 0.0 &&
                   m2[0] <= 0.0 && m2[1] <= 0.0 && m2[2] <= 0.0 && m3 <= 0.0;
  if (psd) return Curvature::Convex;  // a zero Hessian counts as convex
  if (nsd) return Curvature::Concave;
  return Curvature::Neither;
}

namespace {

double monomial(const Eigen::Vector3d& q, double a, double b, double c) {
  return std::pow(q.x(), a) * std::pow(q.y(), b) * std::pow(q.z(), c);
}

// The definiteness check runs on the diagonally-scaled Hessian
// S_ij = q_i q_j d2f/dq_i dq_j, i.e. second differences of f under
// multiplicative steps q_i (1 + s). S = D H D with D = diag(q) is congruent
// to H, so for f > 0 it is (semi-)definite exactly when H is, and its
// finite-difference noise is uniform across entries; the zero eigenvalues
// sitting exactly on the convexity boundaries demand errors well under
// 1e-8 * ||S||, which additive steps cannot deliver when the sampled
// coordinates span two decades.
constexpr double kHessianStep = 1e-2;

// Sixth-order central second difference in the scaled coordinate.
double fd_diag(const Eigen::Vector3d& q, int i, double a, double b, double c) {
  const double h = kHessianStep;
  auto f = [&](double step) {
    Eigen::Vector3d v = q;
    v(i) *= 1.0 + step;
    return monomial(v, a, b, c);
  };
  return (2.0 * (f(3.0 * h) + f(-3.0 * h)) - 27.0 * (f(2.0 * h) + f(-2.0 * h)) +
          270.0 * (f(h) + f(-h)) - 490.0 * f(0.0)) /
         (180.0 * h * h);
}

// Mixed second difference: four-point cross stencil Richardson-extrapolated
// twice, leaving an O(h^6) truncation error.
double fd_mixed(const Eigen::Vector3d& q, int i, int j, double a, double b, double c) {
  auto cross = [&](double hi, double hj) {
    auto f = [&](double si, double sj) {
      Eigen::Vector3d v = q;
      v(i) *= 1.0 + si;
      v(j) *= 1.0 + sj;
      return monomial(v, a, b, c);
    };
    return (f(hi, hj) - f(hi, -hj) - f(-hi, hj) + f(-hi, -hj)) / (4.0 * hi * hj);
  };
  const double hi = kHessianStep, hj = kHessianStep;
  auto fourth = [&](double fi, double fj) {
    return (4.0 * cross(fi / 2.0, fj / 2.0) - cross(fi, fj)) / 3.0;
  };
  return (16.0 * fourth(hi / 2.0, hj / 2.0) - fourth(hi, hj)) / 15.0;
}

}  // namespace

HessianWitness numeric_hessian_witness(double a, double b, double c, int samples,
                                       std::uint64_t seed, Curvature side) {
  if (samples < 1) throw std::invalid_argument("hessian witness: samples must be >= 1");
  if (side == Curvature::Neither)
    throw std::invalid_argument("hessian witness: pick Convex or Concave");
  Rng rng(mix_seed(seed, 0x4E55));
  HessianWitness report;
  report.definite = true;
  for (int k = 0; k < samples; ++k) {
    Eigen::Vector3d q;
    for (int i = 0; i < 3; ++i) q(i) = 0.1 + uniform01(rng) * 9.9;
    Eigen::Matrix3d h;
    for (int i = 0; i < 3; ++i) h(i, i) = fd_diag(q, i, a, b, c);
    h(0, 1) = h(1, 0) = fd_mixed(q, 0, 1, a, b, c);
    h(0, 2) = h(2, 0) = fd_mixed(q, 0, 2, a, b, c);
    h(1, 2) = h(2, 1) = fd_mixed(q, 1, 2, a, b, c);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(h);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double norm = std::max(std::abs(lo), std::abs(hi));
    // An identically-zero Hessian (linear monomial) differences to pure
    // noise; anything below the stencil noise floor counts as zero.
    if (norm <= 1e-9 * std::abs(monomial(q, a, b, c))) continue;
    const double violating = side == Curvature::Convex ? lo / norm : hi / norm;
    const bool violated = side == Curvature::Convex ? violating < -1e-8
                                                    : violating > 1e-8;
    const bool record = side == Curvature::Convex
                            ? violating < report.worst_relative_eig
                            : violating > report.worst_relative_eig;
    if (record) {
      report.worst_relative_eig = violating;
      report.worst_point = q;
    }
    if (violated && report.first_violation < 0) {
      report.definite = false;
      report.first_violation = k;
    }
  }
  return report;
}

}  // namespace vlcsim
