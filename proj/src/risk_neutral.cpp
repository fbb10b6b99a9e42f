#include "riskctl/risk_neutral.hpp"

#include <limits>
#include <string>

#include "riskctl/error.hpp"
#include "riskctl/parallel.hpp"

namespace riskctl {

RiskNeutralSolution solve_risk_neutral(const SystemModel& model, const DpOptions& options) {
  const kernels::KernelTable& kt = options.kernels ? *options.kernels : kernels::active();
  const TransitionStencils& st = model.stencils();
  const std::size_t n = st.nodes;
  const int horizon = model.horizon();
  const double shift = -model.cost_lower();
  const std::vector<double>& prob = model.disturbance().probabilities;

  RiskNeutralSolution sol;
  sol.tables.resize(static_cast<std::size_t>(horizon) + 1);
  sol.policy.grid = model.grid_ptr();
  sol.policy.steps.assign(static_cast<std::size_t>(horizon), std::vector<std::uint16_t>(n, 0));

  ValueTable terminal(horizon, model.grid_ptr());
  for (std::size_t i = 0; i < n; ++i) terminal.values[i] = st.terminal_cost[i] + shift;
  sol.tables[static_cast<std::size_t>(horizon)] = std::move(terminal);

  for (int t = horizon - 1; t >= 0; --t) {
    const std::vector<double>& next = sol.tables[static_cast<std::size_t>(t) + 1].values;
    ValueTable cur(t, model.grid_ptr());
    std::vector<std::uint16_t>& arg = sol.policy.steps[static_cast<std::size_t>(t)];
    parallel_for(n, options.jobs, [&](std::size_t b, std::size_t e) {
      const std::size_t len = e - b;
      std::vector<double> tmp(len), cand(len);
      std::vector<double> best(len, std::numeric_limits<double>::infinity());
      std::vector<std::uint16_t> best_arg(len, 0);
      for (std::size_t u = 0; u < st.controls; ++u) {
        const double* cost = st.stage_costs(u) + b;
        for (std::size_t i = 0; i < len; ++i) cand[i] = cost[i] + shift;
        for (std::size_t k = 0; k < st.atoms; ++k) {
          if (prob[k] == 0.0) continue;
          kt.gather_interp(tmp.data(), next.data(), st.index_block(u, k) + b, st.weight_block(u, k) + b, len,
                           st.corners, n);
          kt.axpy(cand.data(), prob[k], tmp.data(), len);
        }
        kt.argmin_update(best.data(), best_arg.data(), cand.data(), static_cast<std::uint16_t>(u), len);
      }
      std::copy(best.begin(), best.end(), cur.values.begin() + static_cast<std::ptrdiff_t>(b));
      std::copy(best_arg.begin(), best_arg.end(), arg.begin() + static_cast<std::ptrdiff_t>(b));
    });
    sol.tables[static_cast<std::size_t>(t)] = std::move(cur);
  }
  return sol;
}

ValueTable cvar_upper_bound(const ValueTable& jprime, double alpha, double b_lower) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  ValueTable out = jprime;
  for (double& v : out.values) v = b_lower + v / alpha;
  return out;
}

}  // namespace riskctl
