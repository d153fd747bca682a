#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vlcsim/fairness.hpp"
#include "vlcsim/oracle.hpp"
#include "vlcsim/solver.hpp"
#include "vlcsim/verify.hpp"

#include <cmath>
#include <random>

using namespace vlcsim;

namespace {

ProblemInstance unit_instance(double rate = 1.0) {
  ProblemInstance inst;
  inst.beta = 2.0;
  inst.eta0 = 0.75;
  inst.horizon = 1;
  inst.prev_ap = {0};
  inst.rates.slices.assign(1, ArrayXXd::Constant(1, 1, rate));
  return inst;
}

ProblemInstance random_instance(int users, int aps, int horizon, std::uint64_t seed,
                                double beta = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rate(0.5, 10.0);
  ProblemInstance inst;
  inst.beta = beta;
  inst.eta0 = 0.75;
  inst.horizon = horizon;
  inst.rates.slices.assign(static_cast<std::size_t>(horizon), ArrayXXd::Zero(users, aps));
  for (auto& slice : inst.rates.slices)
    for (int u = 0; u < users; ++u)
      for (int a = 0; a < aps; ++a) slice(u, a) = rate(rng);
  inst.prev_ap.resize(static_cast<std::size_t>(users));
  for (auto& ap : inst.prev_ap) ap = static_cast<int>(rng() % static_cast<unsigned>(aps));
  return inst;
}

}  // namespace

TEST_CASE("relaxed objective") {
  RelaxedPrimal primal;
  primal.x.assign(1, ArrayXXd::Zero(1, 1));
  primal.p.assign(1, ArrayXXd::Ones(1, 1));
  primal.r.assign(1, ArrayXXd::Constant(1, 1, 2.0));

  CHECK(relaxed_objective(primal, 2.0) == 0.0);  // h(0) = 0

  primal.x[0](0, 0) = 1.0;
  CHECK(relaxed_objective(primal, 2.0) == doctest::Approx(0.5).epsilon(1e-15));

  SUBCASE("binary x reproduces the original objective magnitude, beta = 2") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    RelaxedPrimal b;
    b.x.assign(2, ArrayXXd::Zero(3, 2));
    b.p.assign(2, ArrayXXd::Zero(3, 2));
    b.r.assign(2, ArrayXXd::Zero(3, 2));
    double expected = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int u = 0; u < 3; ++u) {
        const int a = static_cast<int>(rng() % 2);
        b.x[static_cast<std::size_t>(s)](u, a) = 1.0;
        for (int col = 0; col < 2; ++col) {
          b.p[static_cast<std::size_t>(s)](u, col) = unit(rng);
          b.r[static_cast<std::size_t>(s)](u, col) = 5.0 * unit(rng);
        }
        expected += std::abs(psi(b.p[static_cast<std::size_t>(s)](u, a) *
                                     b.r[static_cast<std::size_t>(s)](u, a),
                                 2.0));
      }
    CHECK(relaxed_objective(b, 2.0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("primal update closed forms") {
  SUBCASE("share formula: beta = 2, gamma' = 0, zeta = -1, lambda = 1") {
    const ProblemInstance inst = unit_instance();
    MultiplierSet mult = MultiplierSet::init(1, 1, 1, 1.0, -1.0, 0.0);
    SolverConfig cfg;
    const RelaxedPrimal primal = primal_update(inst, mult, cfg);
    CHECK(primal.p[0](0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("assignment formula: r = p = lambda = 1 gives x = 1") {
    ProblemInstance inst = unit_instance(1.0);  // prev AP matches, so r^1 = 1
    MultiplierSet mult = MultiplierSet::init(1, 1, 1, 1.0, -4.0, 0.0);  // p* = 1
    SolverConfig cfg;
    const RelaxedPrimal primal = primal_update(inst, mult, cfg);
    CHECK(primal.p[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(primal.r[0](0, 0) == 1.0);
    CHECK(primal.x[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("degenerate flag on all-negative share numerators") {
    const ProblemInstance inst = unit_instance();
    MultiplierSet mult = MultiplierSet::init(1, 1, 1, 1.0, 2.0, 0.0);  // zeta > 0
    SolverConfig cfg;
    const RelaxedPrimal primal = primal_update(inst, mult, cfg);
    CHECK(primal.degenerate);
    CHECK(primal.p[0](0, 0) == cfg.p_floor);
  }
}

TEST_CASE("stationarity of the closed forms (finite differences)") {
  const auto report = verify::kkt_residual_suite(100, 20240901);
  CHECK(report.pass);
  CHECK(report.coords_checked >= 100);
  CHECK(report.worst_residual < 1e-6);
}

TEST_CASE("restricted Lagrangian differencing equals full differencing") {
  // On a benign-scale instance the full-Lagrangian central difference is
  // accurate enough to pin the restriction used by the KKT suite.
  const ProblemInstance inst = random_instance(2, 2, 2, 5);
  MultiplierSet mult = MultiplierSet::init(2, 2, 2, 1.3, -2.0, 0.17);
  SolverConfig cfg;
  RelaxedPrimal primal = primal_update(inst, mult, cfg);
  for (int t = 1; t <= 2; ++t)
    for (int u = 0; u < 2; ++u)
      for (int a = 0; a < 2; ++a)
        for (verify::Var v : {verify::Var::X, verify::Var::P, verify::Var::R}) {
          if (v == verify::Var::R && t == 1) continue;
          auto& slot = (v == verify::Var::X   ? primal.x
                        : v == verify::Var::P ? primal.p
                                              : primal.r)[static_cast<std::size_t>(t - 1)](u, a);
          const double base = slot;
          const double h = 1e-5 * std::max(std::abs(base), 0.1);
          slot = base + h;
          const double full_up = verify::lagrangian_value(inst, primal, mult);
          const double part_up = verify::lagrangian_terms(inst, primal, mult, v, t, u, a);
          slot = base - h;
          const double full_dn = verify::lagrangian_value(inst, primal, mult);
          const double part_dn = verify::lagrangian_terms(inst, primal, mult, v, t, u, a);
          slot = base;
          const double fd_full = (full_up - full_dn) / (2.0 * h);
          const double fd_part = (part_up - part_dn) / (2.0 * h);
          CHECK(fd_full ==
                doctest::Approx(fd_part).epsilon(1e-6).scale(std::abs(fd_part) + 1.0));
        }
}

TEST_CASE("lambda x p = gamma r at unclamped coordinates") {
  SolverConfig cfg;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const ProblemInstance inst = random_instance(3, 2, 3, seed * 7);
    MultiplierSet mult = MultiplierSet::init(3, 2, 3, 1.0, 0.0, 0.05);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 1; t <= 3; ++t) {
      for (int a = 0; a < 2; ++a) mult.lambda(t - 1, a) = 0.3 + 3.0 * unit(rng);
      for (int u = 0; u < 3; ++u) mult.zeta(t - 1, u) = -(0.5 + 6.0 * unit(rng));
      if (t >= 2)
        for (int u = 0; u < 3; ++u)
          for (int a = 0; a < 2; ++a) mult.gamma_at(t)(u, a) = 0.02 + 0.3 * unit(rng);
    }
    const RelaxedPrimal primal = primal_update(inst, mult, cfg);
    for (int t = 2; t <= 3; ++t) {
      const std::size_t s = static_cast<std::size_t>(t - 1);
      for (int u = 0; u < 3; ++u)
        for (int a = 0; a < 2; ++a) {
          const double p = primal.p[s](u, a);
          const double x = primal.x[s](u, a);
          if (!(p > cfg.p_floor * 1.01 && p < 0.999)) continue;
          if (!(x > 1e-9 && x < 0.999)) continue;
          const double lhs = mult.lambda(t - 1, a) * x * p;
          const double rhs = mult.gamma_at(t)(u, a) * primal.r[s](u, a);
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
          ++checked;
        }
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("dual step") {
  ProblemInstance inst = unit_instance(1.0);
  SolverConfig cfg;
  cfg.step0 = 0.1;

  SUBCASE("zero gradients leave multipliers unchanged") {
    RelaxedPrimal primal;
    primal.x.assign(1, ArrayXXd::Ones(1, 1));
    primal.p.assign(1, ArrayXXd::Ones(1, 1));
    primal.r.assign(1, ArrayXXd::Ones(1, 1));
    MultiplierSet mult = MultiplierSet::init(1, 1, 1, 0.7, -1.2, 0.0);
    const double change = dual_step(inst, primal, mult, 1, cfg);
    CHECK(change == 0.0);
    CHECK(mult.lambda(0, 0) == 0.7);
    CHECK(mult.zeta(0, 0) == -1.2);
  }

  SUBCASE("resource update arithmetic") {
    RelaxedPrimal primal;
    primal.x.assign(1, ArrayXXd::Constant(1, 1, 1.5));
    primal.p.assign(1, ArrayXXd::Ones(1, 1));
    primal.r.assign(1, ArrayXXd::Ones(1, 1));
    MultiplierSet mult = MultiplierSet::init(1, 1, 1, 0.2, 0.0, 0.0);
    dual_step(inst, primal, mult, 1, cfg);
    CHECK(mult.lambda(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("lambda is projected at zero") {
    RelaxedPrimal primal;
    primal.x.assign(1, ArrayXXd::Zero(1, 1));
    primal.p.assign(1, ArrayXXd::Ones(1, 1));
    primal.r.assign(1, ArrayXXd::Ones(1, 1));
    MultiplierSet mult = MultiplierSet::init(1, 1, 1, 0.05, 0.0, 0.0);
    dual_step(inst, primal, mult, 1, cfg);
    CHECK(mult.lambda(0, 0) == 0.0);
  }
}

TEST_CASE("assignment recovery") {
  ArrayXXd x(1, 3);
  x << 0.2, 0.7, 0.1;
  CHECK(recover_assignment(x, {0}) == std::vector<int>{1});

  ArrayXXd tie(1, 2);
  tie << 0.5, 0.5;
  CHECK(recover_assignment(tie, {1}) == std::vector<int>{0});  // lowest index wins

  ArrayXXd binary(2, 2);
  binary << 1.0, 0.0, 0.0, 1.0;
  CHECK(recover_assignment(binary, {0, 0}) == std::vector<int>{0, 1});  // idempotent

  ArrayXXd zero = ArrayXXd::Zero(1, 3);
  CHECK(recover_assignment(zero, {2}) == std::vector<int>{2});  // falls back
}

TEST_CASE("allocation normalization") {
  SUBCASE("proportional rescale") {
    ArrayXXd p(2, 1);
    p << 0.3, 0.2;
    normalize_allocation(p, {0, 0});
    CHECK(p(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(p(1, 0) == doctest::Approx(0.4).epsilon(1e-15));
  }

  SUBCASE("single user gets everything; unassigned pairs are zeroed") {
    ArrayXXd p(2, 2);
    p << 0.4, 0.3, 0.1, 0.8;
    normalize_allocation(p, {0, 1});
    CHECK(p(0, 0) == 1.0);
    CHECK(p(0, 1) == 0.0);
    CHECK(p(1, 0) == 0.0);
    CHECK(p(1, 1) == 1.0);
  }

  SUBCASE("zero-sum group gets equal shares") {
    ArrayXXd p = ArrayXXd::Zero(3, 1);
    normalize_allocation(p, {0, 0, 0});
    for (int u = 0; u < 3; ++u) CHECK(p(u, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("solve") {
  SolverConfig cfg;

  SUBCASE("one user, one AP") {
    const ProblemInstance inst = unit_instance(150e6);
    const auto sol = solve(inst, cfg);
    CHECK(sol.plan[0][0] == 0);
    CHECK(sol.x1(0, 0) == 1.0);
    CHECK(sol.p1(0, 0) == 1.0);
  }

  SUBCASE("two users, one AP, equal rates split evenly") {
    ProblemInstance inst;
    inst.beta = 2.0;
    inst.eta0 = 0.75;
    inst.horizon = 1;
    inst.prev_ap = {0, 0};
    inst.rates.slices.assign(1, ArrayXXd::Constant(2, 1, 80e6));
    const auto sol = solve(inst, cfg);
    CHECK(sol.p1(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.p1(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("mobility-unaware special case never touches gamma") {
    const ProblemInstance inst = random_instance(3, 2, 1, 11);
    const auto sol = solve(inst, cfg);
    for (const auto& g : sol.multipliers.gamma) CHECK((g == 0.0).all());
  }

  SUBCASE("feasibility invariants after every solve") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const ProblemInstance inst = random_instance(4, 3, 2, seed * 31);
      const auto sol = solve(inst, cfg);
      for (int u = 0; u < 4; ++u) CHECK(sol.x1.row(u).sum() == 1.0);
      for (int a = 0; a < 3; ++a) {
        const double load = (sol.x1.col(a) * sol.p1.col(a)).sum();
        bool occupied = false;
        for (int u = 0; u < 4; ++u) occupied = occupied || sol.plan[0][static_cast<std::size_t>(u)] == a;
        if (occupied)
          CHECK(load == doctest::Approx(1.0).epsilon(1e-12));
        else
          CHECK(load == 0.0);
      }
    }
  }

  SUBCASE("close to the exhaustive optimum on a random 3x2 T=2 instance") {
    const ProblemInstance inst = random_instance(3, 2, 2, 77);
    const auto exact = exhaustive_solve(inst);
    const auto mvr = solve(inst, cfg);
    const double gap = (exact.utility - mvr.utility) / std::abs(exact.utility);
    CHECK(gap >= -1e-12);
    CHECK(gap <= 0.05);
  }
}

TEST_CASE("monomial curvature checker") {
  CHECK(check_monomial_convexity(3.0, -1.0, -1.0) == Curvature::Convex);
  CHECK(check_monomial_convexity(2.0, -1.0, 0.0) == Curvature::Convex);
  CHECK(check_monomial_convexity(2.9, -1.0, -1.0) == Curvature::Neither);
  CHECK(check_monomial_convexity(0.5, 0.25, 0.25) == Curvature::Concave);  // beta = 0.75, t > 1
  CHECK(check_monomial_convexity(1.0, 0.0, 0.0) == Curvature::Convex);     // linear

  SUBCASE("numeric witness agrees at and off the boundary") {
    const auto at_boundary = numeric_hessian_witness(3.0, -1.0, -1.0, 2000, 9);
    CHECK(at_boundary.definite);
    CHECK(at_boundary.worst_relative_eig > -1e-8);

    const auto linear = numeric_hessian_witness(1.0, 0.0, 0.0, 500, 9);
    CHECK(linear.definite);

    const auto violated = numeric_hessian_witness(2.9, -1.0, -1.0, 2000, 9);
    CHECK_FALSE(violated.definite);
    CHECK(violated.first_violation >= 0);
  }
}
