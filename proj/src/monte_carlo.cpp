#include "riskctl/monte_carlo.hpp"

#include <cmath>

#include "riskctl/error.hpp"
#include "riskctl/parallel.hpp"
#include "riskctl/random.hpp"

namespace riskctl {

namespace {

void check_request(const SystemModel& model, const State& x0, std::size_t n) {
  if (n < 1) throw ParameterError("trajectory count must be at least 1");
  if (x0.size() != model.dimension()) throw InputError("initial state has the wrong dimension");
  if (!model.grid().contains(x0)) throw InputError("initial state lies outside the state grid");
}

}  // namespace

CostSampleSet simulate_policy(const SystemModel& model, const PolicyTable& policy, const State& x0, std::size_t n,
                              std::uint64_t seed, std::size_t jobs) {
  check_request(model, x0, n);
  if (policy.horizon() != model.horizon()) throw InputError("policy horizon does not match the model");
  const DisturbanceSampler sampler(model.disturbance());
  std::vector<double> out(n);
  parallel_for(n, jobs, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      RandomStream rng(seed, i);
      State x = x0;
      double z = 0.0;
      for (int t = 0; t < model.horizon(); ++t) {
        const std::uint16_t u = policy.at(t, model.grid().nearest(x));
        z += model.stage_cost(x, u);
        x = model.step(x, u, sampler.draw(rng));
      }
      out[i] = z + model.terminal_cost(x);
    }
  });
  return CostSampleSet(std::move(out), seed);
}

CostSampleSet simulate_eu(const SystemModel& model, const EuSolution& solution, const State& x0, std::size_t n,
                          std::uint64_t seed, std::size_t jobs) {
  return simulate_policy(model, solution.policy, x0, n, seed, jobs);
}

CostSampleSet simulate_risk_neutral(const SystemModel& model, const RiskNeutralSolution& solution, const State& x0,
                                    std::size_t n, std::uint64_t seed, std::size_t jobs) {
  return simulate_policy(model, solution.policy, x0, n, seed, jobs);
}

CostSampleSet simulate_cvar(const SystemModel& model, const CvarInnerSolution& inner, double alpha, const State& x0,
                            std::size_t n, std::uint64_t seed, std::size_t jobs) {
  check_request(model, x0, n);
  const double s0 = initial_budget(inner, alpha, x0).s;
  std::vector<double> out(n);
  parallel_for(n, jobs, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      RandomStream rng(seed, i);
      out[i] = run_augmented_policy(model, inner, s0, x0, rng).cost;
    }
  });
  return CostSampleSet(std::move(out), seed);
}

std::vector<TradeoffRow> tradeoff_table(const std::map<double, CostSampleSet>& sets, const std::vector<double>& alphas) {
  if (sets.empty()) throw InputError("trade-off table needs at least one sample set");
  std::vector<TradeoffRow> rows;
  for (const auto& [param, set] : sets) {
    const EmpiricalStats st = empirical_stats(set, alphas);
    if (alphas.empty()) {
      rows.push_back({param, st.mean, st.variance, std::nullopt, 0.0, 0.0, 0.0});
      continue;
    }
    for (double a : alphas)
      rows.push_back({param, st.mean, st.variance, a, st.var_at.at(a), st.exceedance_at.at(a), st.cvar_at.at(a)});
  }
  return rows;
}

double eu_estimate(const CostSampleSet& samples, double theta) {
  const double p = 1.0 / static_cast<double>(samples.samples.size());
  std::vector<Atom> atoms;
  atoms.reserve(samples.samples.size());
  double lo = samples.samples.front();
  for (double z : samples.samples) {
    atoms.push_back({z, p});
    lo = std::min(lo, z);
  }
  // Equal weights may not sum to 1 within 1e-12 for large n; renormalise the last atom.
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].probability;
  atoms.back().probability = 1.0 - total;
  return exponential_utility(FiniteDistribution(std::move(atoms)), theta, lo);
}

std::vector<double> bootstrap_standard_errors(const CostSampleSet& samples,
                                              const std::function<std::vector<double>(std::vector<double>&)>& statistic,
                                              std::size_t replicates, std::uint64_t seed) {
  if (replicates < 2) throw ParameterError("bootstrap needs at least 2 replicates");
  const std::vector<double>& z = samples.samples;
  const std::size_t n = z.size();
  std::vector<double> sum, sum_sq;
  std::vector<double> resample;
  for (std::size_t r = 0; r < replicates; ++r) {
    RandomStream rng(seed, r);
    resample.resize(n);  // the statistic may have moved from the buffer
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      resample[i] = z[std::min(pick, n - 1)];
    }
    const std::vector<double> v = statistic(resample);
    if (r == 0) {
      sum.assign(v.size(), 0.0);
      sum_sq.assign(v.size(), 0.0);
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      sum[k] += v[k];
      sum_sq[k] += v[k] * v[k];
    }
  }
  const double b = static_cast<double>(replicates);
  std::vector<double> se(sum.size());
  for (std::size_t k = 0; k < se.size(); ++k) {
    const double mean = sum[k] / b;
    se[k] = std::sqrt(std::max(0.0, (sum_sq[k] - b * mean * mean) / (b - 1.0)));
  }
  return se;
}

}  // namespace riskctl
