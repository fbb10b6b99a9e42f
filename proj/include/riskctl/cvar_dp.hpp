#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "riskctl/eu_dp.hpp"
#include "riskctl/grid.hpp"
#include "riskctl/random.hpp"
#include "riskctl/system_model.hpp"

namespace riskctl {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{8} << 30;

struct CvarOptions {
  std::size_t jobs = 1;
  const kernels::KernelTable* kernels = nullptr;
  std::size_t memory_budget = kDefaultMemoryBudget;
};

/// Budget axis on [-a_upper, a_upper]. [0, a_upper] is split into `resolution` equal
/// intervals and [-a_upper, 0] into ceil(resolution / 2), so the search half is twice as
/// dense. 0 and a_upper are exact nodes. ModelError when a_upper <= 0.
Axis build_s_grid(double a_upper, int resolution);
Axis build_s_grid(const SystemModel& model, int resolution);

struct CvarInnerSolution {
  GridPtr state_grid;
  Axis s_grid{std::vector<double>{0.0, 1.0}};
  /// State axes followed by the budget axis; flat index = state_node * s_nodes + s_node.
  GridPtr augmented_grid;
  /// j_tables[t] holds J_t over the augmented grid, t = 0..N.
  std::vector<ValueTable> j_tables;
  PolicyTable policy;
  double b_lower = 0.0;
  double a_upper = 0.0;
  double cost_shift = 0.0;  // c' = c + cost_shift
  std::size_t s_zero = 0;   // index of the node s = 0

  std::size_t s_nodes() const noexcept { return s_grid.size(); }
};

/// Bytes needed for the J tables and the policy.
std::size_t cvar_memory_estimate(const SystemModel& model, std::size_t s_nodes);

/// sum_k p_k J_{t+1}(f(x,u,w_k), s - c'(x,u)) at state node `node`, budget `s`.
/// Budgets above the axis clamp to its top; below the bottom node s_min the table is
/// extended by J(x, s) = J(x, s_min) + (s_min - s), which is exact since Z' >= 0.
double cvar_inner_backup(const SystemModel& model, const CvarInnerSolution& inner, const ValueTable& next,
                         std::size_t node, double s, std::size_t control);

CvarInnerSolution solve_cvar_inner(const SystemModel& model, int s_resolution, const CvarOptions& options = {});
CvarInnerSolution solve_cvar_inner(const SystemModel& model, Axis s_grid, const CvarOptions& options = {});

struct CvarValue {
  double alpha = 1.0;
  ValueTable values;   // J*_alpha on the state grid
  ValueTable budgets;  // s*_{alpha,x}
};

struct BudgetChoice {
  double s;      // smallest minimizing budget node in [0, a_upper]
  double value;  // J*_alpha = b_lower + s + J_0(x, s) / alpha
};

/// Scans the budget nodes in [0, a_upper] for every state node.
CvarValue outer_minimize(const CvarInnerSolution& inner, double alpha, std::size_t jobs = 1,
                         const kernels::KernelTable* kernels = nullptr);

/// Same scan at an arbitrary state, using the J_0 row interpolated in x.
BudgetChoice initial_budget(const CvarInnerSolution& inner, double alpha, const State& x0,
                            const kernels::KernelTable* kernels = nullptr);

struct Trajectory {
  std::vector<State> states;       // x_0 .. x_N
  std::vector<double> budgets;     // s_0 .. s_N
  std::vector<std::uint16_t> controls;
  double cost = 0.0;               // realized Z in raw cost units
};

/// Runs the augmented policy from (x0, s0): control from the nearest augmented node,
/// budget updated exactly by s <- s - c'(x, u).
Trajectory run_augmented_policy(const SystemModel& model, const CvarInnerSolution& inner, double s0,
                                const State& x0, RandomStream& rng);

/// run_augmented_policy started at s0 = s*_{alpha,x0}.
Trajectory deploy_augmented_policy(const SystemModel& model, const CvarInnerSolution& inner, double alpha,
                                   const State& x0, RandomStream& rng);

}  // namespace riskctl
