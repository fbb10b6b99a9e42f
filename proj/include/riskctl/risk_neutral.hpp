#pragma once

#include <vector>

#include "riskctl/eu_dp.hpp"
#include "riskctl/grid.hpp"
#include "riskctl/system_model.hpp"

namespace riskctl {

struct RiskNeutralSolution {
  /// tables[t] holds J'_t for costs shifted by -d_lower (so J' >= 0), t = 0..N.
  std::vector<ValueTable> tables;
  PolicyTable policy;
};

/// Expectation DP J'_t(x) = min_u c'(x,u) + sum_k p_k J'_{t+1}(f(x,u,w_k)).
RiskNeutralSolution solve_risk_neutral(const SystemModel& model, const DpOptions& options = {});

/// b_lower + J'(x) / alpha, elementwise.
ValueTable cvar_upper_bound(const ValueTable& jprime, double alpha, double b_lower);

}  // namespace riskctl
