#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "riskctl/cvar_dp.hpp"
#include "riskctl/error.hpp"
#include "riskctl/example_systems.hpp"
#include "riskctl/risk_neutral.hpp"

using namespace riskctl;

namespace {

Axis integer_axis(int lo, int hi) {
  std::vector<double> n;
  for (int i = lo; i <= hi; ++i) n.push_back(i);
  return Axis(n);
}

// Zero stage costs, terminal 2x, next state (x + w) mod 3 whatever the control, N = 1.
// From x = 0 the shifted cost is 0 or 2 with probability 1/2 each.
oracle::Toy two_outcome_toy() {
  oracle::Toy t = oracle::eu_toy();
  t.horizon = 1;
  t.p = {0.5, 0.5};
  t.next = [](int x, int, double w) { return (x + static_cast<int>(w)) % 3; };
  t.cost = [](int, int) { return 0.0; };
  t.terminal = [](int x) { return 2.0 * x; };
  return t;
}

double j_at(const CvarInnerSolution& s, int t, std::size_t node, std::size_t sj) {
  return s.j_tables[static_cast<std::size_t>(t)][node * s.s_nodes() + sj];
}

}  // namespace

TEST_CASE("budget grid construction") {
  const Axis s = build_s_grid(32.5, 65);
  CHECK(s.front() == -32.5);
  CHECK(s.back() == 32.5);
  std::size_t zero = 0;
  while (s[zero] != 0.0) ++zero;
  for (std::size_t i = 0; i <= 65; ++i) CHECK(s[zero + i] == doctest::Approx(0.5 * static_cast<double>(i)).epsilon(1e-15));
  // Twice the node density on the search half.
  CHECK(s.size() - 1 - zero == 65);
  CHECK(zero == 33);
  CHECK_THROWS_AS(build_s_grid(0.0, 10), ModelError);
  CHECK_THROWS_AS(build_s_grid(oracle::zero_cost_model(2), 10), ModelError);
  CHECK_THROWS_AS(build_s_grid(5.0, 1), ParameterError);
  for (int res : {2, 3, 7, 100}) {
    const Axis g = build_s_grid(1220.8351, res);
    CHECK(g.back() == 1220.8351);
    CHECK(std::find(g.nodes().begin(), g.nodes().end(), 0.0) != g.nodes().end());
  }
}

TEST_CASE("inner solution matches enumeration of history-dependent policies") {
  for (const oracle::Toy& toy : {oracle::cvar_toy(), oracle::cvar_toy_long()}) {
    const SystemModel m = oracle::to_model(toy);
    const double b = m.bounds().b_lower;
    const int a = static_cast<int>(m.bounds().a_upper);
    const CvarInnerSolution inner = solve_cvar_inner(m, integer_axis(-a, a));
    for (int x = 0; x < toy.states; ++x) {
      const auto dists = oracle::history_policy_distributions(toy, x);
      for (std::size_t j = 0; j < inner.s_nodes(); ++j) {
        const double s = inner.s_grid[j];
        double best = INFINITY;
        for (const auto& d : dists) best = std::min(best, oracle::expected_excess(d, s + b));
        CHECK(std::abs(j_at(inner, 0, static_cast<std::size_t>(x), j) - best) <= 1e-9);
      }
      for (double alpha : {0.25, 0.5, 1.0}) {
        double best = INFINITY;
        for (const auto& d : dists) best = std::min(best, oracle::cvar_tail(d, alpha));
        const CvarValue v = outer_minimize(inner, alpha);
        CHECK(std::abs(v.values[static_cast<std::size_t>(x)] - best) <= 1e-9);
      }
    }
  }
}

TEST_CASE("inner backup examples") {
  const SystemModel m = oracle::to_model(two_outcome_toy());
  const CvarInnerSolution inner = solve_cvar_inner(m, integer_axis(-8, 8));
  CHECK(cvar_inner_backup(m, inner, inner.j_tables[1], 0, 1.0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(outer_minimize(inner, 0.5).values[0] == doctest::Approx(2.0).epsilon(1e-15));

  // Single atom: the backup reads the next table at (f(x, u, w), s - c').
  const oracle::Toy det = oracle::deterministic_toy();
  const SystemModel dm = oracle::to_model(det);
  const int a = static_cast<int>(std::ceil(dm.bounds().a_upper));
  const CvarInnerSolution di = solve_cvar_inner(dm, Axis::uniform(-a, a, 8 * static_cast<std::size_t>(a)));
  const int t = 1;
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t u = 0; u < 2; ++u)
      for (double s : {0.0, 0.25, 1.5}) {
        const double cp = dm.stage_cost(dm.grid().node(x), u) + di.cost_shift;
        const int nx = det.next(static_cast<int>(x), static_cast<int>(u), 1.0);
        const double want = interpolate(*di.augmented_grid, di.j_tables[t + 1].values, Point{static_cast<double>(nx), s - cp});
        CHECK(cvar_inner_backup(dm, di, di.j_tables[t + 1], x, s, u) == doctest::Approx(want).epsilon(1e-14));
      }
}

TEST_CASE("zero-cost model gives J0 = max(-s, 0) and zero backups for s >= 0") {
  const SystemModel m = oracle::zero_cost_model(3);
  const CvarInnerSolution inner = solve_cvar_inner(m, Axis::uniform(-2.0, 2.0, 8));
  for (std::size_t i = 0; i < m.grid().size(); ++i)
    for (std::size_t j = 0; j < inner.s_nodes(); ++j) {
      const double s = inner.s_grid[j];
      CHECK(j_at(inner, 0, i, j) == doctest::Approx(std::max(-s, 0.0)).epsilon(1e-14));
      if (s >= 0.0)
        for (std::size_t u = 0; u < 2; ++u) CHECK(cvar_inner_backup(m, inner, inner.j_tables[3], i, s, u) == 0.0);
    }
}

TEST_CASE("inner solution invariants on the thermostat") {
  const SystemModel m = make_thermostat();
  const CvarInnerSolution inner = solve_cvar_inner(m, 20);
  const double a = inner.a_upper;
  const std::size_t S = inner.s_nodes();
  CHECK(inner.s_grid[inner.s_zero] == 0.0);
  CHECK(inner.s_grid.back() == a);
  for (std::size_t i = 0; i < m.grid().size(); ++i) {
    const double cn = m.terminal_cost(m.grid().node(i)) + inner.cost_shift;
    for (std::size_t j = 0; j < S; ++j) CHECK(j_at(inner, m.horizon(), i, j) == doctest::Approx(std::max(cn - inner.s_grid[j], 0.0)).epsilon(1e-14));
    // Zero up to the interpolation error that leaks up the budget axis one cell per stage.
    CHECK(j_at(inner, 0, i, S - 1) <= 1e-6);
  }
  for (int t = 0; t <= m.horizon(); ++t)
    for (std::size_t i = 0; i < m.grid().size(); ++i)
      for (std::size_t j = 0; j < S; ++j) {
        const double v = j_at(inner, t, i, j);
        CHECK(v >= 0.0);
        if (inner.s_grid[j] >= 0.0) CHECK(v <= a + 1e-12);
        if (j + 1 < S) {
          const double w = j_at(inner, t, i, j + 1);
          CHECK(w <= v + 1e-12);                                               // non-increasing in s
          CHECK(v - w <= inner.s_grid[j + 1] - inner.s_grid[j] + 1e-9);        // 1-Lipschitz
        }
      }
}

TEST_CASE("alpha = 1 recovers the risk-neutral value with zero budget") {
  for (const oracle::Toy& toy : {oracle::cvar_toy(), oracle::cvar_toy_long()}) {
    const SystemModel m = oracle::to_model(toy);
    const int a = static_cast<int>(m.bounds().a_upper);
    const CvarValue v = outer_minimize(solve_cvar_inner(m, integer_axis(-a, a)), 1.0);
    const RiskNeutralSolution rn = solve_risk_neutral(m);
    for (std::size_t x = 0; x < 2; ++x) {
      CHECK(std::abs(v.values[x] - (m.bounds().b_lower + rn.tables[0][x])) <= 1e-12);
      CHECK(v.budgets[x] == 0.0);
    }
  }
}

TEST_CASE("deterministic model: CVaR equals the path cost at every level") {
  const oracle::Toy det = oracle::deterministic_toy();
  const SystemModel m = oracle::to_model(det);
  // Shifted costs are multiples of 0.05, so the budget walk stays on this grid.
  const double a = m.bounds().a_upper;
  const CvarInnerSolution inner = solve_cvar_inner(m, Axis::uniform(-a, a, static_cast<std::size_t>(std::lround(40 * a))));
  for (double alpha : {1.0, 0.5, 0.05}) {
    const CvarValue v = outer_minimize(inner, alpha);
    for (int x = 0; x < 3; ++x) {
      const double z = oracle::tree_search_cost(det, x);
      CHECK(v.values[static_cast<std::size_t>(x)] == doctest::Approx(z).epsilon(1e-12));
      // Ties on [0, z'] at alpha = 1 resolve to the smallest budget; below 1 the minimizer is z' itself.
      const double want_s = alpha == 1.0 ? 0.0 : z - m.bounds().b_lower;
      CHECK(v.budgets[static_cast<std::size_t>(x)] == doctest::Approx(want_s).epsilon(1e-12));
      RandomStream rng(1, 0);
      const Trajectory tr = deploy_augmented_policy(m, inner, alpha, State{static_cast<double>(x)}, rng);
      CHECK(tr.cost == doctest::Approx(z).epsilon(1e-12));
      CHECK(tr.states.size() == 4);
      CHECK(tr.budgets.size() == 4);
      CHECK(tr.controls.size() == 3);
      // The budget falls by exactly the shifted stage cost.
      for (std::size_t t = 0; t < 3; ++t)
        CHECK(tr.budgets[t + 1] == tr.budgets[t] - (m.stage_cost(tr.states[t], tr.controls[t]) + inner.cost_shift));
    }
  }
}

TEST_CASE("outer minimization invariants") {
  const SystemModel m = make_thermostat();
  const CvarInnerSolution inner = solve_cvar_inner(m, 30);
  std::vector<double> prev;
  for (double alpha : {1.0, 0.5, 0.05, 0.005}) {
    const CvarValue v = outer_minimize(inner, alpha);
    for (std::size_t i = 0; i < m.grid().size(); ++i) {
      const double s = v.budgets[i];
      CHECK(s >= 0.0);
      CHECK(s <= inner.a_upper);
      const std::size_t j = inner.s_grid.nearest(s);
      CHECK(v.values[i] == doctest::Approx(inner.b_lower + s + j_at(inner, 0, i, j) / alpha).epsilon(1e-14));
      if (!prev.empty()) CHECK(v.values[i] >= prev[i] - 1e-12);
      const BudgetChoice c = initial_budget(inner, alpha, m.grid().node(i));
      CHECK(c.s == s);
      CHECK(c.value == v.values[i]);
    }
    prev = v.values.values;
    const CvarValue par = outer_minimize(inner, alpha, 8);
    CHECK(par.values.values == v.values.values);
  }
  CHECK_THROWS_AS(outer_minimize(inner, 0.0), ParameterError);
  CHECK_THROWS_AS(outer_minimize(inner, 1.5), ParameterError);
}

TEST_CASE("memory budget refusal reports the requirement") {
  const SystemModel m = make_thermostat();
  CvarOptions o;
  o.memory_budget = 1024;
  try {
    solve_cvar_inner(m, 65, o);
    FAIL("expected refusal");
  } catch (const MemoryBudgetExceeded& e) {
    CHECK(e.required_bytes() == cvar_memory_estimate(m, build_s_grid(m, 65).size()));
    CHECK(e.budget_bytes() == 1024);
    CHECK(std::string(e.what()).find(std::to_string(e.required_bytes())) != std::string::npos);
  }
}

TEST_CASE("inner solve is independent of the worker count") {
  const SystemModel m = make_thermostat();
  CvarOptions one, eight;
  eight.jobs = 8;
  const CvarInnerSolution a = solve_cvar_inner(m, 16, one), b = solve_cvar_inner(m, 16, eight);
  for (std::size_t t = 0; t < a.j_tables.size(); ++t) CHECK(a.j_tables[t].values == b.j_tables[t].values);
  for (int t = 0; t < a.policy.horizon(); ++t) CHECK(a.policy.steps[t] == b.policy.steps[t]);
}

TEST_CASE("budget grid must contain zero") {
  CHECK_THROWS_AS(solve_cvar_inner(oracle::to_model(oracle::cvar_toy()), Axis({-1.5, 0.5, 9.0})), InputError);
}
