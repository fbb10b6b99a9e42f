#include <doctest.h>

#include <cstring>
#include <random>

#include "oracles.hpp"
#include "riskctl/cvar_dp.hpp"
#include "riskctl/error.hpp"
#include "riskctl/eu_dp.hpp"
#include "riskctl/example_systems.hpp"
#include "riskctl/grid.hpp"
#include "riskctl/kernels.hpp"
#include "riskctl/risk_neutral.hpp"

using namespace riskctl;

TEST_CASE("axis construction and location") {
  CHECK_THROWS_AS(Axis(std::vector<double>{0.0, 0.0}), InputError);
  const Axis a = Axis::uniform(18.0, 23.0, 50);
  CHECK(a.size() == 51);
  CHECK(a.back() == 23.0);
  CHECK(a.locate(18.0).weight == 0.0);
  const AxisLocation loc = a.locate(a[7]);
  CHECK(loc.index == 7);
  CHECK(loc.weight == 0.0);
  const AxisLocation top = a.locate(30.0);
  CHECK((1.0 - top.weight) * a[top.index] + top.weight * a[std::min<std::size_t>(top.index + 1, a.size() - 1)] == 23.0);
  CHECK(a.clamp(30.0) == 23.0);
  CHECK(a.nearest(18.04) == 0);
  CHECK(a.nearest(18.06) == 1);
}

TEST_CASE("interpolation examples") {
  auto g1 = std::make_shared<const Grid>(std::vector<Axis>{Axis({0.0, 1.0})});
  CHECK(interpolate(ValueTable(0, g1, {0.0, 10.0}), Point{0.25}) == doctest::Approx(2.5));
  auto g2 = std::make_shared<const Grid>(std::vector<Axis>{Axis({0.0, 1.0}), Axis({0.0, 1.0})});
  CHECK(interpolate(ValueTable(0, g2, {0.0, 0.0, 10.0, 10.0}), Point{0.5, 0.5}) == doctest::Approx(5.0));
  // Clamped outside the box.
  CHECK(interpolate(ValueTable(0, g2, {0.0, 0.0, 10.0, 10.0}), Point{7.0, -3.0}) == 10.0);
}

TEST_CASE("interpolation is exact at nodes and linear along axes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto g = std::make_shared<const Grid>(std::vector<Axis>{Axis::uniform(0.0, 2.0, 7), Axis::uniform(-1.0, 4.0, 5)});
  ValueTable tab(0, g);
  for (double& v : tab.values) v = u(rng);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(interpolate(tab, g->node(i)) == tab.values[i]);
  // An affine function is reproduced everywhere in the box.
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Point p = g->node(i);
    tab.values[i] = 2.0 * p[0] - 0.5 * p[1] + 1.0;
  }
  for (int rep = 0; rep < 100; ++rep) {
    const Point p{std::abs(u(rng)) / 1.5, u(rng) / 1.2 + 1.5};
    CHECK(interpolate(tab, p) == doctest::Approx(2.0 * p[0] - 0.5 * p[1] + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("grid indexing") {
  const Grid g({Axis::uniform(0.0, 1.0, 2), Axis::uniform(0.0, 3.0, 3)});
  CHECK(g.size() == 12);
  const std::size_t multi[] = {1, 2};
  CHECK(g.flat_index(multi) == 6);
  CHECK(g.node(6) == Point{0.5, 2.0});
  CHECK(g.nearest(Point{0.74, 2.4}) == 6);
  CHECK(g.contains(Point{1.0, 3.0}));
  CHECK_FALSE(g.contains(Point{1.01, 3.0}));
  CHECK(g.clamp(Point{-1.0, 5.0}) == Point{0.0, 3.0});
}

namespace {

template <class T>
bool bit_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

}  // namespace

TEST_CASE("SIMD kernels are bitwise equivalent to the scalar reference") {
  using namespace kernels;
  if (!supported(Isa::kAvx2)) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const KernelTable& s = scalar_table();
  const KernelTable& v = table(Isa::kAvx2);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  auto fill = [&](std::size_t n) {
    std::vector<double> x(n);
    for (double& e : x) e = u(rng);
    return x;
  };
  for (std::size_t n = 0; n <= 37; ++n) {
    for (std::size_t corners : {1u, 2u, 4u}) {
      const std::size_t m = 50;
      const std::vector<double> values = fill(m);
      std::vector<std::uint32_t> index(corners * n);
      for (auto& i : index) i = static_cast<std::uint32_t>(rng() % m);
      const std::vector<double> weight = fill(corners * n);
      std::vector<double> a(n), b(n);
      s.gather_interp(a.data(), values.data(), index.data(), weight.data(), n, corners, n);
      v.gather_interp(b.data(), values.data(), index.data(), weight.data(), n, corners, n);
      CHECK(bit_equal(a, b));
    }
    const std::vector<double> x = fill(n);
    std::vector<double> y1 = fill(n), y2 = y1;
    s.axpy(y1.data(), 0.3, x.data(), n);
    v.axpy(y2.data(), 0.3, x.data(), n);
    CHECK(bit_equal(y1, y2));
    s.max_inplace(y1.data(), x.data(), n);
    v.max_inplace(y2.data(), x.data(), n);
    CHECK(bit_equal(y1, y2));

    std::vector<double> best1 = fill(n), best2 = best1;
    std::vector<std::uint16_t> arg1(n, 0), arg2(n, 0);
    std::vector<double> cand = fill(n);
    for (std::size_t i = 0; i < n; i += 3) cand[i] = best1[i];  // ties keep the earlier control
    s.argmin_update(best1.data(), arg1.data(), cand.data(), 4, n);
    v.argmin_update(best2.data(), arg2.data(), cand.data(), 4, n);
    CHECK(bit_equal(best1, best2));
    CHECK(bit_equal(arg1, arg2));
    for (std::size_t i = 0; i < n; i += 3) CHECK(arg1[i] == 0);

    const std::vector<double> base = fill(n);
    const double m1 = s.affine_min(base.data(), x.data(), 1.7, n);
    const double m2 = v.affine_min(base.data(), x.data(), 1.7, n);
    CHECK(std::memcmp(&m1, &m2, sizeof m1) == 0);
    for (double thr : {-30.0, 0.0, m1, 30.0})
      CHECK(s.affine_first_at_most(base.data(), x.data(), 1.7, thr, n) ==
            v.affine_first_at_most(base.data(), x.data(), 1.7, thr, n));
  }
}

TEST_CASE("solvers give bitwise identical tables under every kernel table") {
  using namespace kernels;
  if (!supported(Isa::kAvx2)) return;
  const SystemModel m = make_thermostat();
  DpOptions a{1, &scalar_table()}, b{1, &table(Isa::kAvx2)};
  const EuSolution e1 = solve_eu(m, -3.0, EuVariant::kRaw, a), e2 = solve_eu(m, -3.0, EuVariant::kRaw, b);
  for (std::size_t t = 0; t < e1.value_tables.size(); ++t) CHECK(bit_equal(e1.value_tables[t].values, e2.value_tables[t].values));
  for (int t = 0; t < e1.policy.horizon(); ++t) CHECK(e1.policy.steps[t] == e2.policy.steps[t]);

  const RiskNeutralSolution r1 = solve_risk_neutral(m, a), r2 = solve_risk_neutral(m, b);
  CHECK(bit_equal(r1.tables[0].values, r2.tables[0].values));

  CvarOptions c1, c2;
  c1.kernels = &scalar_table();
  c2.kernels = &table(Isa::kAvx2);
  const CvarInnerSolution i1 = solve_cvar_inner(m, 20, c1), i2 = solve_cvar_inner(m, 20, c2);
  for (std::size_t t = 0; t < i1.j_tables.size(); ++t) CHECK(bit_equal(i1.j_tables[t].values, i2.j_tables[t].values));
  const CvarValue o1 = outer_minimize(i1, 0.05, 1, c1.kernels), o2 = outer_minimize(i2, 0.05, 1, c2.kernels);
  CHECK(bit_equal(o1.values.values, o2.values.values));
  CHECK(bit_equal(o1.budgets.values, o2.budgets.values));
}

TEST_CASE("kernel selection by name") {
  CHECK(kernels::parse_isa("scalar") == kernels::Isa::kScalar);
  CHECK_THROWS_AS(kernels::parse_isa("neon"), InputError);
}
