#include "riskctl/example_systems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/skew_normal.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "riskctl/error.hpp"
#include "riskctl/risk_core.hpp"

namespace riskctl {

DisturbanceTable moment_matched_table(std::vector<double> support, double mean, double variance, double skewness) {
  const std::size_t n = support.size();
  if (n < 4) throw InputError("moment matching needs at least 4 support points");
  if (!(variance > 0.0)) throw InputError("moment matching needs a positive variance");
  const double sd = std::sqrt(variance);
  // Rows: total mass, mean, and central second and third moments.
  Eigen::MatrixXd a(4, n);
  Eigen::VectorXd rhs(4);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = support[i] - mean;
    a(0, static_cast<Eigen::Index>(i)) = 1.0;
    a(1, static_cast<Eigen::Index>(i)) = d;
    a(2, static_cast<Eigen::Index>(i)) = d * d;
    a(3, static_cast<Eigen::Index>(i)) = d * d * d;
  }
  rhs << 1.0, 0.0, variance, skewness * sd * sd * sd;

  const Eigen::VectorXd ref = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  std::vector<bool> free(n, true);
  Eigen::VectorXd p = ref;
  for (std::size_t iter = 0; iter <= n; ++iter) {
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < n; ++i)
      if (free[i]) cols.push_back(static_cast<Eigen::Index>(i));
    if (cols.size() < 4) break;
    Eigen::MatrixXd af(4, static_cast<Eigen::Index>(cols.size()));
    Eigen::VectorXd rf(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      af.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
      rf(static_cast<Eigen::Index>(c)) = ref(cols[c]);
    }
    // Minimum-norm correction: p = ref + A^T lambda with A A^T lambda = rhs - A ref.
    const Eigen::VectorXd lambda = (af * af.transpose()).ldlt().solve(rhs - af * rf);
    const Eigen::VectorXd pf = rf + af.transpose() * lambda;
    p.setZero();
    bool negative = false;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      p(cols[c]) = pf(static_cast<Eigen::Index>(c));
      if (pf(static_cast<Eigen::Index>(c)) < 0.0) {
        free[static_cast<std::size_t>(cols[c])] = false;
        negative = true;
      }
    }
    if (!negative) {
      std::vector<double> probs(p.data(), p.data() + n);
      // Absorb round-off so the probabilities sum to 1 within the table tolerance.
      double total = 0.0;
      for (double q : probs) total += q;
      for (double& q : probs) q /= total;
      return DisturbanceTable(std::move(support), std::move(probs));
    }
  }
  throw InputError("no non-negative table on this support matches the requested moments");
}

namespace thermostat {

double decay() { return std::exp(-kStep / (kCapacitance * kResistance)); }

double next_state(double x, double u, double w) {
  const double a = decay();
  return a * x + (1.0 - a) * (kTemperatureShift - kEfficiency * kResistance * kPower * u) + w;
}

double cost(double x) { return std::max(x - 21.0, 20.0 - x); }

DisturbanceTable default_disturbance() {
  std::vector<double> support;
  for (int i = -3; i <= 6; ++i) support.push_back(0.05 * i);
  return moment_matched_table(std::move(support), 0.0, 0.08 * 0.08, 1.0);
}

}  // namespace thermostat

SystemModel make_thermostat(const ThermostatOptions& options) {
  ModelSpec spec;
  spec.name = "thermostat";
  spec.horizon = thermostat::kHorizon;
  spec.state_axes = {Axis::uniform(18.0, 23.0, 50)};
  for (int i = 0; i <= 10; ++i) spec.controls.push_back(i == 10 ? 1.0 : 0.1 * i);
  spec.disturbance = options.disturbance ? *options.disturbance : thermostat::default_disturbance();
  spec.dynamics = [](const State& x, double u, double w) { return State{thermostat::next_state(x[0], u, w)}; };
  spec.stage_cost = [](const State& x, double) { return thermostat::cost(x[0]); };
  spec.terminal_cost = [](const State& x) { return thermostat::cost(x[0]); };
  return SystemModel(std::move(spec));
}

namespace stormwater {

double max_outflow(double radius, double elevation, double k_max) {
  return kDischarge * std::numbers::pi * radius * radius * std::sqrt(2.0 * kGravity * (k_max - elevation));
}

double regulated_outflow(double q_max, double elevation, double k_max, double level) {
  // Levels above k_max cannot occur on the grid; cap the flow there anyway.
  return q_max - q_max / (k_max - elevation) * std::clamp(k_max - level, 0.0, k_max - elevation);
}

double combined_sewer_flow(int tank, double level) {
  if (tank == 1) {
    const double q = max_outflow(kOutletRadius1, kOutletElevation1, kMaxLevel1);
    return kOutlets1 * regulated_outflow(q, kOutletElevation1, kMaxLevel1, level);
  }
  if (tank == 2) {
    const double q = max_outflow(kOutletRadius2, kOutletElevation2, kMaxLevel2);
    return kOutlets2 * regulated_outflow(q, kOutletElevation2, kMaxLevel2, level);
  }
  throw InputError("tank index must be 1 or 2");
}

double storm_sewer_flow(double level2) {
  const double q = max_outflow(kStormRadius, kStormElevation, kMaxLevel2);
  return regulated_outflow(q, kStormElevation, kMaxLevel2, level2);
}

double cost(const State& x) {
  return (combined_sewer_flow(1, x[0]) + combined_sewer_flow(2, x[1])) * kStepSeconds * 0.01;
}

DisturbanceTable default_disturbance() {
  std::vector<double> support;
  for (int i = 0; i < 10; ++i) support.push_back(2.0 + 0.5 * i);
  return moment_matched_table(std::move(support), 4.0, 1.2, 0.72);
}

}  // namespace stormwater

double pump_rate(const State& x, double u) {
  using namespace stormwater;
  const double lo = kPumpElevation - kPumpBand;
  const double hi = kPumpElevation + kPumpBand;
  if ((x[0] < lo && u < 0.0) || (x[1] < lo && u >= 0.0)) return 0.0;
  const double ramp = u * kPumpRate / (2.0 * kPumpBand);
  if (u < 0.0 && x[0] <= hi) return ramp * (x[0] + kPumpBand - kPumpElevation);
  if (u >= 0.0 && x[1] <= hi) return ramp * (x[1] + kPumpBand - kPumpElevation);
  return u * kPumpRate;
}

SystemModel make_stormwater(const StormwaterOptions& options) {
  using namespace stormwater;
  const double h = options.grid_step;
  auto intervals = [h](double k_max) {
    const double m = k_max / h;
    const double r = std::round(m);
    if (!(h > 0.0) || r < 1.0 || std::abs(m - r) > 1e-9 * r)
      throw InputError("stormwater grid step " + std::to_string(h) + " does not divide the tank heights");
    return static_cast<std::size_t>(r);
  };
  ModelSpec spec;
  spec.name = "stormwater";
  spec.horizon = kHorizon;
  spec.state_axes = {Axis::uniform(0.0, kMaxLevel1, intervals(kMaxLevel1)),
                     Axis::uniform(0.0, kMaxLevel2, intervals(kMaxLevel2))};
  spec.controls = {-1.0, 0.0, 1.0};
  spec.disturbance = options.disturbance ? *options.disturbance : default_disturbance();
  spec.dynamics = [](const State& x, double u, double w) {
    const double q = pump_rate(x, u);
    const double f1 = (w - combined_sewer_flow(1, x[0]) + q) / kArea1;
    const double f2 = (w - combined_sewer_flow(2, x[1]) - q - storm_sewer_flow(x[1])) / kArea2;
    return State{x[0] + f1 * kStepSeconds, x[1] + f2 * kStepSeconds};
  };
  spec.stage_cost = [](const State& x, double) { return cost(x); };
  spec.terminal_cost = [](const State& x) { return cost(x); };
  return SystemModel(std::move(spec));
}

namespace {

constexpr std::size_t kPedagogicalAtoms = 1001;
constexpr double kPedagogicalSkew = -0.5;

// Quantile discretization at shape a, standardized to mean 0 and variance 1.
std::vector<double> standardized_table(double shape) {
  const boost::math::skew_normal_distribution<double> dist(0.0, 1.0, shape);
  std::vector<double> v(kPedagogicalAtoms);
  for (std::size_t i = 0; i < kPedagogicalAtoms; ++i)
    v[i] = boost::math::quantile(dist, (static_cast<double>(i) + 0.5) / static_cast<double>(kPedagogicalAtoms));
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(kPedagogicalAtoms);
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(kPedagogicalAtoms));
  for (double& x : v) x = (x - mean) / sd;
  return v;
}

double raw_moment(const std::vector<double>& v, int k) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, k);
  return s / static_cast<double>(v.size());
}

PedagogicalDisturbance build_pedagogical() {
  auto f = [](double a) { return raw_moment(standardized_table(a), 3) - kPedagogicalSkew; };
  boost::uintmax_t iters = 100;
  const auto bracket = boost::math::tools::toms748_solve(f, -20.0, 0.0, boost::math::tools::eps_tolerance<double>(50), iters);
  PedagogicalDisturbance w;
  w.shape = 0.5 * (bracket.first + bracket.second);
  w.values = standardized_table(w.shape);
  w.m3 = raw_moment(w.values, 3);
  w.m4 = raw_moment(w.values, 4);
  return w;
}

}  // namespace

const PedagogicalDisturbance& pedagogical_disturbance() {
  static const PedagogicalDisturbance w = build_pedagogical();
  return w;
}

std::vector<PedagogicalRow> pedagogical_curves(const std::vector<double>& u_grid, const std::vector<double>& gammas,
                                               const std::vector<double>& alphas) {
  const PedagogicalDisturbance& w = pedagogical_disturbance();
  for (double g : gammas)
    if (!(g >= 0.0)) throw ParameterError("gamma must be non-negative");
  std::vector<PedagogicalRow> rows;
  const double p = 1.0 / static_cast<double>(w.values.size());
  for (double u : u_grid) {
    if (!std::isfinite(u)) throw ParameterError("u must be finite");
    PedagogicalRow row;
    row.u = u;
    row.mean = 2.0 * u * u + 1.0;
    row.variance = 4.0 * u * u + 4.0 * u * w.m3 + (w.m4 - 1.0);
    for (double g : gammas) row.certainty_equivalent.push_back(certainty_equivalent(row.mean, row.variance, g));
    std::vector<Atom> atoms;
    atoms.reserve(w.values.size());
    for (double x : w.values) atoms.push_back({u * u + (x + u) * (x + u), p});
    const FiniteDistribution phi(std::move(atoms));
    for (double a : alphas) row.cvar.push_back(cvar_exact(phi, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

SystemModel make_system(std::string_view name) {
  if (name == "thermostat") return make_thermostat();
  if (name == "stormwater") return make_stormwater();
  throw InputError("unknown system '" + std::string(name) + "' (expected thermostat or stormwater)");
}

}  // namespace riskctl
