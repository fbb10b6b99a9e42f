#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "riskctl/cvar_dp.hpp"
#include "riskctl/error.hpp"
#include "riskctl/eu_dp.hpp"
#include "riskctl/example_systems.hpp"
#include "riskctl/monte_carlo.hpp"
#include "riskctl/risk_neutral.hpp"

using namespace riskctl;

namespace {

Axis integer_axis(int lo, int hi) {
  std::vector<double> n;
  for (int i = lo; i <= hi; ++i) n.push_back(i);
  return Axis(n);
}

double sample_mean(const CostSampleSet& s) {
  return std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / static_cast<double>(s.samples.size());
}

double standard_error(const CostSampleSet& s) {
  const double m = sample_mean(s);
  double v = 0.0;
  for (double z : s.samples) v += (z - m) * (z - m);
  return std::sqrt(v / static_cast<double>(s.samples.size() - 1) / static_cast<double>(s.samples.size()));
}

}  // namespace

TEST_CASE("random streams are reproducible and well spread") {
  RandomStream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.next() != c.next());
  const DisturbanceSampler smp(DisturbanceTable({1.0, 2.0, 3.0}, {0.25, 0.0, 0.75}));
  CHECK(smp.index(0.0) == 0);
  CHECK(smp.index(0.2499) == 0);
  CHECK(smp.index(0.25) == 2);
  CHECK(smp.index(0.999999) == 2);
}

TEST_CASE("single-atom disturbance gives identical costs") {
  const oracle::Toy det = oracle::deterministic_toy();
  const SystemModel m = oracle::to_model(det);
  const RiskNeutralSolution rn = solve_risk_neutral(m);
  const CostSampleSet s = simulate_risk_neutral(m, rn, State{1.0}, 50, 3);
  for (double z : s.samples) CHECK(z == s.samples.front());
  CHECK(s.samples.front() == doctest::Approx(oracle::tree_search_cost(det, 1)).epsilon(1e-12));
}

TEST_CASE("simulation is reproducible and independent of the worker count") {
  const SystemModel m = make_thermostat();
  const EuSolution e = solve_eu(m, -3.0, EuVariant::kRaw);
  const CostSampleSet a = simulate_eu(m, e, State{20.5}, 5000, 9, 1);
  const CostSampleSet b = simulate_eu(m, e, State{20.5}, 5000, 9, 1);
  const CostSampleSet c = simulate_eu(m, e, State{20.5}, 5000, 9, 8);
  const CostSampleSet d = simulate_eu(m, e, State{20.5}, 5000, 10, 1);
  CHECK(a.samples == b.samples);
  CHECK(a.samples == c.samples);
  CHECK(a.samples != d.samples);
  CHECK(a.seed == 9);
  // Z' >= 0 on every trajectory.
  for (double z : a.samples) CHECK(z >= m.bounds().b_lower - 1e-12);
}

TEST_CASE("simulation entry checks") {
  const SystemModel m = make_thermostat();
  const RiskNeutralSolution rn = solve_risk_neutral(m);
  CHECK_THROWS_AS(simulate_risk_neutral(m, rn, State{20.0}, 0, 1), ParameterError);
  CHECK_THROWS_AS(simulate_risk_neutral(m, rn, State{20.0, 1.0}, 10, 1), InputError);
  CHECK_THROWS_AS(simulate_risk_neutral(m, rn, State{25.0}, 10, 1), InputError);
}

TEST_CASE("tiny MDP: Monte Carlo estimates agree with the DP values") {
  const oracle::Toy toy = oracle::cvar_toy_long();
  const SystemModel m = oracle::to_model(toy);
  const std::size_t n = 100000;

  const EuSolution e = solve_eu(m, -1.0, EuVariant::kRaw);
  const CostSampleSet se = simulate_eu(m, e, State{0.0}, n, 21);
  const double se_eu = bootstrap_standard_errors(se, [](std::vector<double>& z) {
                         return std::vector<double>{eu_estimate(CostSampleSet(z, 0), -1.0)};
                       }, 200, 5)[0];
  CHECK(std::abs(eu_estimate(se, -1.0) - e.optimal_values()[0]) <= 3.0 * se_eu);

  const int a = static_cast<int>(m.bounds().a_upper);
  const CvarInnerSolution inner = solve_cvar_inner(m, integer_axis(-a, a));
  const RiskNeutralSolution rn = solve_risk_neutral(m);
  for (std::size_t x = 0; x < 2; ++x) {
    const CostSampleSet s1 = simulate_cvar(m, inner, 1.0, State{static_cast<double>(x)}, n, 22);
    CHECK(std::abs(sample_mean(s1) - (m.bounds().b_lower + rn.tables[0][x])) <= 3.0 * standard_error(s1));

    const CostSampleSet s5 = simulate_cvar(m, inner, 0.5, State{static_cast<double>(x)}, n, 23);
    const double target = outer_minimize(inner, 0.5).values[x];
    const double se5 = bootstrap_standard_errors(s5, [](std::vector<double>& z) {
                         return std::vector<double>{cvar_estimate(CostSampleSet(z, 0), 0.5)};
                       }, 200, 6)[0];
    CHECK(std::abs(cvar_estimate(s5, 0.5) - target) <= 3.0 * se5 + 1e-12);
  }
}

TEST_CASE("deterministic model: sample CVaR equals the optimal value") {
  const oracle::Toy det = oracle::deterministic_toy();
  const SystemModel m = oracle::to_model(det);
  const double a = m.bounds().a_upper;
  const CvarInnerSolution inner = solve_cvar_inner(m, Axis::uniform(-a, a, static_cast<std::size_t>(std::lround(40 * a))));
  for (double alpha : {1.0, 0.5, 0.05}) {
    const CostSampleSet s = simulate_cvar(m, inner, alpha, State{2.0}, 100, 4);
    CHECK(cvar_estimate(s, alpha) == doctest::Approx(outer_minimize(inner, alpha).values[2]).epsilon(1e-12));
  }
}

TEST_CASE("empirical CVaR converges on the tiny MDP") {
  const oracle::Toy toy = oracle::cvar_toy_long();
  const SystemModel m = oracle::to_model(toy);
  const int a = static_cast<int>(m.bounds().a_upper);
  const CvarInnerSolution inner = solve_cvar_inner(m, integer_axis(-a, a));
  const double alpha = 0.3;
  const double exact = outer_minimize(inner, alpha).values[0];
  std::vector<double> err;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    double e = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
      e += std::abs(cvar_estimate(simulate_cvar(m, inner, alpha, State{0.0}, n, seed * 1000 + n), alpha) - exact);
    err.push_back(e / 10.0);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("tradeoff table rows") {
  std::map<double, CostSampleSet> sets;
  sets[0.5] = CostSampleSet({3.0, 3.0, 3.0}, 1);
  sets[1.0] = CostSampleSet({1.0, 2.0, 6.0, 7.0}, 1);
  const auto plain = tradeoff_table(sets);
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].parameter == 0.5);
  CHECK(plain[0].variance == 0.0);
  CHECK_FALSE(plain[0].alpha.has_value());
  const auto tails = tradeoff_table(sets, {1.0, 0.25});
  REQUIRE(tails.size() == 4);
  CHECK(tails[2].parameter == 1.0);
  CHECK(*tails[2].alpha == 1.0);
  CHECK(tails[2].cvar == doctest::Approx(tails[2].mean).epsilon(1e-15));
  CHECK(*tails[3].alpha == 0.25);
  CHECK(tails[3].var == 6.0);
  CHECK(tails[3].cvar == 7.0);
}

TEST_CASE("thermostat EU sweep trades mean for variance") {
  const SystemModel m = make_thermostat();
  std::map<double, CostSampleSet> sets;
  for (double theta : {-5e-5, -3.0, -9.0}) {
    const EuSolution e = solve_eu(m, theta, EuVariant::kRaw);
    sets[theta] = simulate_eu(m, e, State{19.8}, 100000, 17);
  }
  const auto rows = tradeoff_table(sets);  // ordered by increasing theta: -9, -3, -5e-5
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK(rows[i].mean >= rows[i + 1].mean);
    CHECK(rows[i].variance <= rows[i + 1].variance);
  }
}

TEST_CASE("bootstrap standard error of the mean") {
  std::vector<double> z(4000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = static_cast<double>(i % 10);
  const CostSampleSet s(z, 0);
  const auto se = bootstrap_standard_errors(s, [](std::vector<double>& v) {
    return std::vector<double>{std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())};
  }, 400, 3);
  CHECK(se[0] == doctest::Approx(standard_error(s)).epsilon(0.15));
}
