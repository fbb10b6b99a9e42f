#include "riskctl/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskctl/error.hpp"

namespace riskctl {

DisturbanceTable::DisturbanceTable(std::vector<double> s, std::vector<double> p)
    : support(std::move(s)), probabilities(std::move(p)) {
  if (support.size() != probabilities.size()) throw InputError("disturbance support and probabilities differ in length");
  // Validation shared with FiniteDistribution.
  (void)distribution();
}

FiniteDistribution DisturbanceTable::distribution() const {
  std::vector<Atom> atoms;
  atoms.reserve(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) atoms.push_back({support[k], probabilities[k]});
  return FiniteDistribution(std::move(atoms));
}

double DisturbanceTable::mean() const { return distribution().mean(); }
double DisturbanceTable::variance() const { return distribution().variance(); }

double DisturbanceTable::skewness() const {
  const double m = mean();
  const double v = variance();
  if (v <= 0.0) return 0.0;
  double m3 = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) m3 += probabilities[k] * std::pow(support[k] - m, 3);
  return m3 / std::pow(v, 1.5);
}

Bounds derived_bounds(int horizon, double d_lower, double d_upper) {
  if (horizon < 0) throw ModelError("horizon must be non-negative");
  if (d_lower > d_upper) throw ModelError("cost lower bound exceeds upper bound");
  const double steps = static_cast<double>(horizon) + 1.0;
  return {steps * d_lower, (d_upper - d_lower) * steps};
}

SystemModel::SystemModel(ModelSpec spec) : spec_(std::move(spec)) {
  if (spec_.horizon < 1) throw ModelError("horizon must be a positive integer");
  if (spec_.controls.empty()) throw ModelError("control set is empty");
  if (spec_.controls.size() > UINT16_MAX) throw ModelError("control set too large for policy tables");
  if (spec_.disturbance.size() == 0) throw ModelError("disturbance table is empty");
  if (!spec_.dynamics || !spec_.stage_cost || !spec_.terminal_cost) throw ModelError("model functions are missing");
  grid_ = std::make_shared<const Grid>(spec_.state_axes);

  TransitionStencils& st = stencils_;
  const Grid& g = *grid_;
  st.nodes = g.size();
  st.corners = std::size_t{1} << g.dimension();
  st.controls = spec_.controls.size();
  st.atoms = spec_.disturbance.size();
  st.index.resize(st.controls * st.atoms * st.corners * st.nodes);
  st.weight.resize(st.index.size());
  st.stage_cost.resize(st.controls * st.nodes);
  st.terminal_cost.resize(st.nodes);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<std::uint32_t> idx(st.corners);
  std::vector<double> w(st.corners);
  for (std::size_t i = 0; i < st.nodes; ++i) {
    const State x = g.node(i);
    const double cn = spec_.terminal_cost(x);
    if (!std::isfinite(cn)) throw ModelError("terminal cost is not finite on the grid");
    st.terminal_cost[i] = cn;
    lo = std::min(lo, cn);
    hi = std::max(hi, cn);
    for (std::size_t u = 0; u < st.controls; ++u) {
      const double c = spec_.stage_cost(x, spec_.controls[u]);
      if (!std::isfinite(c)) throw ModelError("stage cost is not finite on the grid");
      st.stage_cost[u * st.nodes + i] = c;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
      for (std::size_t k = 0; k < st.atoms; ++k) {
        const State next = step_value(x, spec_.controls[u], spec_.disturbance.support[k]);
        g.stencil(next, idx, w);
        const std::size_t base = st.block(u, k);
        for (std::size_t c2 = 0; c2 < st.corners; ++c2) {
          st.index[base + c2 * st.nodes + i] = idx[c2];
          st.weight[base + c2 * st.nodes + i] = w[c2];
        }
      }
    }
  }
  d_lower_ = lo;
  d_upper_ = hi;
  bounds_ = derived_bounds(spec_.horizon, lo, hi);
}

State SystemModel::step_value(const State& x, double u, double w) const {
  const State next = spec_.dynamics(x, u, w);
  if (next.size() != grid_->dimension()) throw ModelError("dynamics returned a state of the wrong dimension");
  for (double v : next)
    if (!std::isfinite(v)) throw ModelError("dynamics returned a non-finite state");
  return grid_->clamp(next);
}

State SystemModel::step(const State& x, std::size_t control, double w) const {
  return step_value(x, spec_.controls[control], w);
}

}  // namespace riskctl
