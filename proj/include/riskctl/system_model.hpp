#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "riskctl/grid.hpp"
#include "riskctl/risk_core.hpp"

namespace riskctl {

/// Finite disturbance distribution, the same at every (x, u).
struct DisturbanceTable {
  std::vector<double> support;
  std::vector<double> probabilities;

  DisturbanceTable() = default;
  DisturbanceTable(std::vector<double> s, std::vector<double> p);

  std::size_t size() const noexcept { return support.size(); }
  double mean() const;
  double variance() const;
  double skewness() const;
  FiniteDistribution distribution() const;
};

/// User-facing description of a model. Dynamics may leave the grid box; the model clamps.
struct ModelSpec {
  std::string name;
  int horizon = 0;
  std::vector<Axis> state_axes;
  std::vector<double> controls;
  DisturbanceTable disturbance;
  std::function<State(const State& x, double u, double w)> dynamics;
  std::function<double(const State& x, double u)> stage_cost;
  std::function<double(const State& x)> terminal_cost;
};

struct Bounds {
  double b_lower;  // (N+1) * d_lower
  double a_upper;  // (d_upper - d_lower) * (N+1)
};

/// Returns ((N+1) d_lower, (d_upper - d_lower)(N+1)); ModelError when d_lower > d_upper.
Bounds derived_bounds(int horizon, double d_lower, double d_upper);

/// Next-state interpolation stencils for every (control, disturbance atom, grid node),
/// plus stage and terminal costs sampled on the grid.
///
/// Layout of a (u, k) block is corner-major: index[c * nodes + i], weight[c * nodes + i].
struct TransitionStencils {
  std::size_t nodes = 0;
  std::size_t corners = 0;
  std::size_t controls = 0;
  std::size_t atoms = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> weight;
  std::vector<double> stage_cost;     // [u * nodes + i]
  std::vector<double> terminal_cost;  // [i]

  std::size_t block(std::size_t u, std::size_t k) const noexcept { return (u * atoms + k) * corners * nodes; }
  const std::uint32_t* index_block(std::size_t u, std::size_t k) const noexcept { return index.data() + block(u, k); }
  const double* weight_block(std::size_t u, std::size_t k) const noexcept { return weight.data() + block(u, k); }
  const double* stage_costs(std::size_t u) const noexcept { return stage_cost.data() + u * nodes; }
};

/// Discrete-time finite-horizon stochastic control system on a state grid.
/// Cost bounds d_lower, d_upper come from an exhaustive sweep over grid states and controls.
class SystemModel {
 public:
  explicit SystemModel(ModelSpec spec);

  const std::string& name() const noexcept { return spec_.name; }
  int horizon() const noexcept { return spec_.horizon; }
  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t dimension() const noexcept { return grid_->dimension(); }
  const std::vector<double>& controls() const noexcept { return spec_.controls; }
  const DisturbanceTable& disturbance() const noexcept { return spec_.disturbance; }

  /// Clamped dynamics.
  State step(const State& x, std::size_t control, double w) const;
  State step_value(const State& x, double u, double w) const;
  double stage_cost(const State& x, std::size_t control) const { return spec_.stage_cost(x, spec_.controls[control]); }
  double terminal_cost(const State& x) const { return spec_.terminal_cost(x); }

  double cost_lower() const noexcept { return d_lower_; }
  double cost_upper() const noexcept { return d_upper_; }
  Bounds bounds() const noexcept { return bounds_; }
  State clamp_state(const State& x) const { return grid_->clamp(x); }

  const TransitionStencils& stencils() const noexcept { return stencils_; }

 private:
  ModelSpec spec_;
  GridPtr grid_;
  double d_lower_ = 0.0;
  double d_upper_ = 0.0;
  Bounds bounds_{};
  TransitionStencils stencils_;
};

inline Bounds derived_bounds(const SystemModel& model) { return model.bounds(); }
inline State clamp_state(const SystemModel& model, const State& x) { return model.clamp_state(x); }

}  // namespace riskctl
