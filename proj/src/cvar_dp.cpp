#include "riskctl/cvar_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskctl/error.hpp"
#include "riskctl/parallel.hpp"

namespace riskctl {

Axis build_s_grid(double a_upper, int resolution) {
  if (resolution < 2) throw ParameterError("s-grid resolution must be at least 2");
  if (!(a_upper > 0.0) || !std::isfinite(a_upper))
    throw ModelError("budget range is degenerate (a_upper = " + std::to_string(a_upper) + ")");
  const std::size_t pos = static_cast<std::size_t>(resolution);
  const std::size_t neg = (pos + 1) / 2;
  std::vector<double> nodes;
  nodes.reserve(pos + neg + 1);
  for (std::size_t i = 0; i < neg; ++i) nodes.push_back(-(a_upper * static_cast<double>(neg - i)) / static_cast<double>(neg));
  nodes.push_back(0.0);
  for (std::size_t i = 1; i < pos; ++i) nodes.push_back((a_upper * static_cast<double>(i)) / static_cast<double>(pos));
  nodes.push_back(a_upper);
  return Axis(std::move(nodes));
}

Axis build_s_grid(const SystemModel& model, int resolution) { return build_s_grid(model.bounds().a_upper, resolution); }

std::size_t cvar_memory_estimate(const SystemModel& model, std::size_t s_nodes) {
  const double cells = static_cast<double>(model.grid().size()) * static_cast<double>(s_nodes);
  const double steps = static_cast<double>(model.horizon());
  const double bytes = cells * ((steps + 1.0) * sizeof(double) + steps * sizeof(std::uint16_t));
  if (bytes >= static_cast<double>(std::numeric_limits<std::size_t>::max())) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(bytes);
}

namespace {

// Corner-major 2-point stencils on the budget axis for targets s_j - shift (ascending in j).
// Returns the number of leading targets below the bottom node; for those the stencil
// points at node 0 and extra[j] carries the affine extension s_min - target.
std::size_t budget_stencil(const Axis& s, double shift, std::uint32_t* index, double* weight, double* extra) {
  const std::size_t n = s.size();
  const std::size_t last = n - 1;
  std::size_t below = 0;
  std::size_t hi = 1;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = s[j] - shift;
    if (target < s.front()) {
      index[j] = 0;
      index[n + j] = 1;
      weight[j] = 1.0;
      weight[n + j] = 0.0;
      extra[j] = s.front() - target;
      ++below;
      continue;
    }
    const double x = std::min(target, s.back());
    while (hi < last && s[hi] <= x) ++hi;
    const std::size_t lo = hi - 1;
    const double w = (x - s[lo]) / (s[hi] - s[lo]);
    index[j] = static_cast<std::uint32_t>(lo);
    index[n + j] = static_cast<std::uint32_t>(hi);
    weight[j] = 1.0 - w;
    weight[n + j] = w;
    extra[j] = 0.0;
  }
  return below;
}

std::size_t find_zero(const Axis& s) {
  const auto nodes = s.nodes();
  const auto it = std::find(nodes.begin(), nodes.end(), 0.0);
  if (it == nodes.end()) throw InputError("budget grid must contain 0 as a node");
  return static_cast<std::size_t>(it - nodes.begin());
}

}  // namespace

double cvar_inner_backup(const SystemModel& model, const CvarInnerSolution& inner, const ValueTable& next,
                         std::size_t node, double s, std::size_t control) {
  const State x = model.grid().node(node);
  const double target = s - (model.stage_cost(x, control) + inner.cost_shift);
  const double s_min = inner.s_grid.front();
  const double extension = target < s_min ? s_min - target : 0.0;
  const DisturbanceTable& d = model.disturbance();
  double acc = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.probabilities[k] == 0.0) continue;
    State p = model.step(x, control, d.support[k]);
    p.push_back(std::max(target, s_min));
    acc += d.probabilities[k] * interpolate(next, p);
  }
  return acc + extension;
}

CvarInnerSolution solve_cvar_inner(const SystemModel& model, int s_resolution, const CvarOptions& options) {
  return solve_cvar_inner(model, build_s_grid(model, s_resolution), options);
}

CvarInnerSolution solve_cvar_inner(const SystemModel& model, Axis s_grid, const CvarOptions& options) {
  const std::size_t required = cvar_memory_estimate(model, s_grid.size());
  if (required > options.memory_budget) throw MemoryBudgetExceeded(required, options.memory_budget);

  const kernels::KernelTable& kt = options.kernels ? *options.kernels : kernels::active();
  const TransitionStencils& st = model.stencils();
  const std::size_t n = st.nodes;
  const std::size_t S = s_grid.size();
  const int horizon = model.horizon();
  const std::vector<double>& prob = model.disturbance().probabilities;

  CvarInnerSolution sol;
  sol.s_zero = find_zero(s_grid);
  sol.state_grid = model.grid_ptr();
  std::vector<Axis> axes(model.grid().axes().begin(), model.grid().axes().end());
  axes.push_back(s_grid);
  sol.augmented_grid = std::make_shared<const Grid>(std::move(axes));
  sol.s_grid = std::move(s_grid);
  sol.b_lower = model.bounds().b_lower;
  sol.a_upper = model.bounds().a_upper;
  sol.cost_shift = -model.cost_lower();
  sol.j_tables.resize(static_cast<std::size_t>(horizon) + 1);
  sol.policy.grid = sol.augmented_grid;
  sol.policy.steps.assign(static_cast<std::size_t>(horizon), std::vector<std::uint16_t>(n * S, 0));

  const Axis& s = sol.s_grid;
  const double shift = sol.cost_shift;
  ValueTable terminal(horizon, sol.augmented_grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double cn = st.terminal_cost[i] + shift;
    for (std::size_t j = 0; j < S; ++j) terminal.values[i * S + j] = std::max(cn - s[j], 0.0);
  }
  sol.j_tables[static_cast<std::size_t>(horizon)] = std::move(terminal);

  for (int t = horizon - 1; t >= 0; --t) {
    const double* next = sol.j_tables[static_cast<std::size_t>(t) + 1].values.data();
    ValueTable cur(t, sol.augmented_grid);
    std::vector<std::uint16_t>& arg = sol.policy.steps[static_cast<std::size_t>(t)];
    parallel_for(n, options.jobs, [&](std::size_t b, std::size_t e) {
      std::vector<double> row(S), cand(S), best(S), weight(2 * S), extra(S);
      std::vector<std::uint32_t> index(2 * S);
      std::vector<std::uint16_t> best_arg(S);
      for (std::size_t i = b; i < e; ++i) {
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        std::fill(best_arg.begin(), best_arg.end(), std::uint16_t{0});
        for (std::size_t u = 0; u < st.controls; ++u) {
          // row(s') = sum_k p_k J_{t+1}(f(x_i, u, w_k), s') on every budget node s'
          std::fill(row.begin(), row.end(), 0.0);
          for (std::size_t k = 0; k < st.atoms; ++k) {
            if (prob[k] == 0.0) continue;
            const std::uint32_t* ix = st.index_block(u, k);
            const double* wx = st.weight_block(u, k);
            for (std::size_t c = 0; c < st.corners; ++c) {
              const double a = prob[k] * wx[c * n + i];
              if (a == 0.0) continue;
              kt.axpy(row.data(), a, next + static_cast<std::size_t>(ix[c * n + i]) * S, S);
            }
          }
          const double cp = st.stage_costs(u)[i] + shift;
          const std::size_t below = budget_stencil(s, cp, index.data(), weight.data(), extra.data());
          kt.gather_interp(cand.data(), row.data(), index.data(), weight.data(), S, 2, S);
          for (std::size_t j = 0; j < below; ++j) cand[j] = cand[j] + extra[j];
          kt.argmin_update(best.data(), best_arg.data(), cand.data(), static_cast<std::uint16_t>(u), S);
        }
        std::copy(best.begin(), best.end(), cur.values.begin() + static_cast<std::ptrdiff_t>(i * S));
        std::copy(best_arg.begin(), best_arg.end(), arg.begin() + static_cast<std::ptrdiff_t>(i * S));
      }
    });
    sol.j_tables[static_cast<std::size_t>(t)] = std::move(cur);
  }
  return sol;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1], got " + std::to_string(alpha));
}

// Budget nodes scanned by the outer minimization: [s_zero, end).
std::size_t scan_end(const CvarInnerSolution& inner) {
  const auto nodes = inner.s_grid.nodes();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), inner.a_upper);
  return std::max(static_cast<std::size_t>(it - nodes.begin()), inner.s_zero + 1);
}

BudgetChoice scan_row(const CvarInnerSolution& inner, const double* row, double alpha, const kernels::KernelTable& kt) {
  const std::size_t lo = inner.s_zero;
  const std::size_t len = scan_end(inner) - lo;
  const double* s = inner.s_grid.nodes().data() + lo;
  const double scale = 1.0 / alpha;
  const double best = kt.affine_min(s, row + lo, scale, len);
  const double threshold = best + 1e-12 * std::max(1.0, std::abs(best));
  const std::size_t j = kt.affine_first_at_most(s, row + lo, scale, threshold, len);
  return {s[j], inner.b_lower + (s[j] + scale * row[lo + j])};
}

}  // namespace

CvarValue outer_minimize(const CvarInnerSolution& inner, double alpha, std::size_t jobs,
                         const kernels::KernelTable* kernels) {
  check_alpha(alpha);
  const kernels::KernelTable& kt = kernels ? *kernels : kernels::active();
  const std::size_t n = inner.state_grid->size();
  const std::size_t S = inner.s_nodes();
  const double* j0 = inner.j_tables.at(0).values.data();
  CvarValue out{alpha, ValueTable(0, inner.state_grid), ValueTable(0, inner.state_grid)};
  parallel_for(n, jobs, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const BudgetChoice c = scan_row(inner, j0 + i * S, alpha, kt);
      out.values.values[i] = c.value;
      out.budgets.values[i] = c.s;
    }
  });
  return out;
}

BudgetChoice initial_budget(const CvarInnerSolution& inner, double alpha, const State& x0,
                            const kernels::KernelTable* kernels) {
  check_alpha(alpha);
  const kernels::KernelTable& kt = kernels ? *kernels : kernels::active();
  const Grid& g = *inner.state_grid;
  const std::size_t S = inner.s_nodes();
  std::uint32_t idx[1u << kMaxAxes];
  double w[1u << kMaxAxes];
  const std::size_t corners = g.stencil(x0, idx, w);
  const double* j0 = inner.j_tables.at(0).values.data();
  std::vector<double> row(S, 0.0);
  for (std::size_t j = 0; j < S; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < corners; ++c) acc = acc + w[c] * j0[static_cast<std::size_t>(idx[c]) * S + j];
    row[j] = acc;
  }
  return scan_row(inner, row.data(), alpha, kt);
}

Trajectory run_augmented_policy(const SystemModel& model, const CvarInnerSolution& inner, double s0,
                                const State& x0, RandomStream& rng) {
  const DisturbanceSampler sampler(model.disturbance());
  const std::size_t S = inner.s_nodes();
  Trajectory tr;
  State x = model.clamp_state(x0);
  double s = s0;
  tr.states.push_back(x);
  tr.budgets.push_back(s);
  for (int t = 0; t < model.horizon(); ++t) {
    const std::size_t node = inner.state_grid->nearest(x) * S + inner.s_grid.nearest(s);
    const std::uint16_t u = inner.policy.at(t, node);
    const double c = model.stage_cost(x, u);
    tr.cost += c;
    s = s - (c + inner.cost_shift);
    x = model.step(x, u, sampler.draw(rng));
    tr.controls.push_back(u);
    tr.states.push_back(x);
    tr.budgets.push_back(s);
  }
  tr.cost += model.terminal_cost(x);
  return tr;
}

Trajectory deploy_augmented_policy(const SystemModel& model, const CvarInnerSolution& inner, double alpha,
                                   const State& x0, RandomStream& rng) {
  const BudgetChoice start = initial_budget(inner, alpha, model.clamp_state(x0));
  return run_augmented_policy(model, inner, start.s, x0, rng);
}

}  // namespace riskctl
