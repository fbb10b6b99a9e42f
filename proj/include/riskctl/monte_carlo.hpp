#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "riskctl/cvar_dp.hpp"
#include "riskctl/eu_dp.hpp"
#include "riskctl/grid.hpp"
#include "riskctl/risk_core.hpp"
#include "riskctl/risk_neutral.hpp"
#include "riskctl/system_model.hpp"

namespace riskctl {

/// Realized Z of n trajectories under a Markov policy on the state grid. Controls come from
/// the nearest grid node; trajectory i draws from RandomStream(seed, i).
CostSampleSet simulate_policy(const SystemModel& model, const PolicyTable& policy, const State& x0, std::size_t n,
                              std::uint64_t seed, std::size_t jobs = 1);

CostSampleSet simulate_eu(const SystemModel& model, const EuSolution& solution, const State& x0, std::size_t n,
                          std::uint64_t seed, std::size_t jobs = 1);

CostSampleSet simulate_risk_neutral(const SystemModel& model, const RiskNeutralSolution& solution, const State& x0,
                                    std::size_t n, std::uint64_t seed, std::size_t jobs = 1);

/// Deploys the augmented policy from (x0, s*_{alpha,x0}) n times.
CostSampleSet simulate_cvar(const SystemModel& model, const CvarInnerSolution& inner, double alpha, const State& x0,
                            std::size_t n, std::uint64_t seed, std::size_t jobs = 1);

struct TradeoffRow {
  double parameter = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> alpha;  // set when tail statistics were requested
  double var = 0.0;
  double exceedance = 0.0;
  double cvar = 0.0;
};

/// One row per parameter (mean and variance only) when `alphas` is empty, otherwise one
/// row per (parameter, alpha). Rows are ordered by parameter, then by the order of `alphas`.
std::vector<TradeoffRow> tradeoff_table(const std::map<double, CostSampleSet>& sets,
                                        const std::vector<double>& alphas = {});

/// Empirical exponential utility of a sample set.
double eu_estimate(const CostSampleSet& samples, double theta);

/// Bootstrap standard errors of a vector-valued statistic. The statistic may reorder or consume its argument.
std::vector<double> bootstrap_standard_errors(const CostSampleSet& samples,
                                              const std::function<std::vector<double>(std::vector<double>&)>& statistic,
                                              std::size_t replicates, std::uint64_t seed);

}  // namespace riskctl
