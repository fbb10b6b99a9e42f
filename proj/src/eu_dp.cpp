#include "riskctl/eu_dp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "riskctl/error.hpp"
#include "riskctl/parallel.hpp"

namespace riskctl {

std::string_view to_string(EuVariant v) noexcept { return v == EuVariant::kRaw ? "raw" : "nonnegative"; }

EuVariant parse_eu_variant(std::string_view name) {
  if (name == "raw") return EuVariant::kRaw;
  if (name == "nonnegative") return EuVariant::kNonnegative;
  throw InputError("unknown EU variant '" + std::string(name) + "' (expected raw or nonnegative)");
}

ValueTable EuSolution::optimal_values() const {
  ValueTable out = value_tables.at(0);
  for (double& v : out.values) v += offset;
  return out;
}

double eu_backup(const SystemModel& model, const ValueTable& next, double theta, std::size_t node,
                 std::size_t control, double cost_shift) {
  if (!(theta < 0.0)) throw ParameterError("theta must be negative");
  const double beta = -theta / 2.0;
  const State x = model.grid().node(node);
  const DisturbanceTable& d = model.disturbance();
  std::vector<double> v(d.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d.size(); ++k) {
    v[k] = interpolate(next, model.step(x, control, d.support[k]));
    if (d.probabilities[k] > 0.0 && v[k] > m) m = v[k];
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d.probabilities[k] > 0.0) sum += d.probabilities[k] * std::expm1(beta * (v[k] - m));
  const double out = (model.stage_cost(x, control) + cost_shift) + (m + std::log1p(sum) / beta);
  if (!std::isfinite(out)) throw NumericalInstability(theta, next.time - 1, node, control);
  return out;
}

EuSolution solve_eu(const SystemModel& model, double theta, EuVariant variant, const DpOptions& options,
                    EuArithmetic arithmetic) {
  if (!(theta < 0.0)) throw ParameterError("theta must be negative, got " + std::to_string(theta));
  const kernels::KernelTable& kt = options.kernels ? *options.kernels : kernels::active();
  const TransitionStencils& st = model.stencils();
  const std::size_t n = st.nodes;
  const int horizon = model.horizon();
  const double beta = -theta / 2.0;
  const double shift = variant == EuVariant::kNonnegative ? -model.cost_lower() : 0.0;

  std::vector<std::size_t> atoms;
  std::vector<double> prob;
  for (std::size_t k = 0; k < st.atoms; ++k) {
    if (model.disturbance().probabilities[k] > 0.0) {
      atoms.push_back(k);
      prob.push_back(model.disturbance().probabilities[k]);
    }
  }
  const std::size_t na = atoms.size();

  EuSolution sol;
  sol.theta = theta;
  sol.variant = variant;
  sol.offset = variant == EuVariant::kNonnegative ? model.bounds().b_lower : 0.0;
  sol.value_tables.resize(static_cast<std::size_t>(horizon) + 1);
  sol.policy.grid = model.grid_ptr();
  sol.policy.steps.assign(static_cast<std::size_t>(horizon), std::vector<std::uint16_t>(n, 0));

  ValueTable terminal(horizon, model.grid_ptr());
  for (std::size_t i = 0; i < n; ++i) terminal.values[i] = st.terminal_cost[i] + shift;
  sol.value_tables[static_cast<std::size_t>(horizon)] = std::move(terminal);

  for (int t = horizon - 1; t >= 0; --t) {
    const std::vector<double>& next = sol.value_tables[static_cast<std::size_t>(t) + 1].values;
    ValueTable cur(t, model.grid_ptr());
    std::vector<std::uint16_t>& arg = sol.policy.steps[static_cast<std::size_t>(t)];

    parallel_for(n, options.jobs, [&](std::size_t b, std::size_t e) {
      const std::size_t len = e - b;
      std::vector<double> vals(na * len), m(len), cand(len);
      std::vector<double> best(len, std::numeric_limits<double>::infinity());
      std::vector<std::uint16_t> best_arg(len, 0);
      for (std::size_t u = 0; u < st.controls; ++u) {
        for (std::size_t a = 0; a < na; ++a)
          kt.gather_interp(vals.data() + a * len, next.data(), st.index_block(u, atoms[a]) + b,
                           st.weight_block(u, atoms[a]) + b, len, st.corners, n);
        const double* cost = st.stage_costs(u) + b;
        if (arithmetic == EuArithmetic::kStabilized) {
          std::copy(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(len), m.begin());
          for (std::size_t a = 1; a < na; ++a) kt.max_inplace(m.data(), vals.data() + a * len, len);
          for (std::size_t i = 0; i < len; ++i) {
            double sum = 0.0;
            for (std::size_t a = 0; a < na; ++a) sum += prob[a] * std::expm1(beta * (vals[a * len + i] - m[i]));
            cand[i] = (cost[i] + shift) + (m[i] + std::log1p(sum) / beta);
          }
        } else {
          for (std::size_t i = 0; i < len; ++i) {
            double sum = 0.0;
            for (std::size_t a = 0; a < na; ++a) sum += prob[a] * std::exp(beta * vals[a * len + i]);
            cand[i] = (cost[i] + shift) + std::log(sum) / beta;
          }
        }
        for (std::size_t i = 0; i < len; ++i)
          if (!std::isfinite(cand[i])) throw NumericalInstability(theta, t, b + i, u);
        kt.argmin_update(best.data(), best_arg.data(), cand.data(), static_cast<std::uint16_t>(u), len);
      }
      std::copy(best.begin(), best.end(), cur.values.begin() + static_cast<std::ptrdiff_t>(b));
      std::copy(best_arg.begin(), best_arg.end(), arg.begin() + static_cast<std::ptrdiff_t>(b));
    });
    sol.value_tables[static_cast<std::size_t>(t)] = std::move(cur);
  }
  return sol;
}

std::vector<ThetaProbe> stable_theta_probe(const SystemModel& model, const std::vector<double>& thetas,
                                           const DpOptions& options, EuArithmetic arithmetic) {
  std::vector<ThetaProbe> out;
  for (double theta : thetas) {
    if (!(theta < 0.0)) throw ParameterError("probe thetas must be negative");
    for (EuVariant v : {EuVariant::kRaw, EuVariant::kNonnegative}) {
      try {
        (void)solve_eu(model, theta, v, options, arithmetic);
        out.push_back({theta, v, true, {}});
      } catch (const NumericalInstability& e) {
        out.push_back({theta, v, false, e.what()});
      }
    }
  }
  return out;
}

}  // namespace riskctl
