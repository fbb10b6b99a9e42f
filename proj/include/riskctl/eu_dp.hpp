#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "riskctl/grid.hpp"
#include "riskctl/kernels.hpp"
#include "riskctl/system_model.hpp"

namespace riskctl {

/// kRaw works with c, c_N directly. kNonnegative shifts every cost by -d_lower so
/// V' >= 0, and reports b_lower + V'_0.
enum class EuVariant { kRaw, kNonnegative };

/// kStabilized factors the largest exponent out of the expectation before exponentiating.
/// kDirect evaluates log(sum p exp(beta v)) literally; it exists to locate the range of
/// theta where the unshifted recursion overflows.
enum class EuArithmetic { kStabilized, kDirect };

std::string_view to_string(EuVariant v) noexcept;
EuVariant parse_eu_variant(std::string_view name);

struct DpOptions {
  std::size_t jobs = 1;
  const kernels::KernelTable* kernels = nullptr;  // nullptr: kernels::active()
};

struct EuSolution {
  double theta = 0.0;
  EuVariant variant = EuVariant::kRaw;
  /// value_tables[t] holds V_t (raw) or V'_t (nonnegative), t = 0..N.
  std::vector<ValueTable> value_tables;
  PolicyTable policy;
  /// Added to value_tables[0] to obtain the optimal value in raw cost units.
  double offset = 0.0;

  /// V*_theta on the state grid, in raw cost units.
  ValueTable optimal_values() const;
};

/// c(x,u) + (-2/theta) log sum_k p_k exp((-theta/2) V_{t+1}(f(x,u,w_k))) at grid node `node`.
/// `cost_shift` is added to c (use -d_lower for the nonnegative variant).
double eu_backup(const SystemModel& model, const ValueTable& next, double theta, std::size_t node,
                 std::size_t control, double cost_shift = 0.0);

EuSolution solve_eu(const SystemModel& model, double theta, EuVariant variant, const DpOptions& options = {},
                    EuArithmetic arithmetic = EuArithmetic::kStabilized);

struct ThetaProbe {
  double theta;
  EuVariant variant;
  bool stable;
  std::string detail;  // empty when stable
};

/// Solves at every theta in both variants and records which solves stay finite.
/// Defaults to kDirect: the shifted evaluation cannot overflow, so it has no frontier to find.
std::vector<ThetaProbe> stable_theta_probe(const SystemModel& model, const std::vector<double>& thetas,
                                           const DpOptions& options = {},
                                           EuArithmetic arithmetic = EuArithmetic::kDirect);

}  // namespace riskctl
