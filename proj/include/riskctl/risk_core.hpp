#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace riskctl {

struct Atom {
  double value;
  double probability;
};

/// Finitely supported distribution. Probabilities are non-negative and sum to 1 within 1e-12.
class FiniteDistribution {
 public:
  explicit FiniteDistribution(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double mean() const noexcept;
  double variance() const noexcept;
  double min_value() const noexcept;
  /// Largest value carrying positive probability.
  double max_value() const noexcept;

  /// Distribution of Z + shift.
  FiniteDistribution shifted(double shift) const;

 private:
  std::vector<Atom> atoms_;
};

/// Realized costs together with the seed that produced them.
struct CostSampleSet {
  std::vector<double> samples;
  std::uint64_t seed = 0;

  CostSampleSet() = default;
  CostSampleSet(std::vector<double> s, std::uint64_t sd);
};

struct EmpiricalStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor n-1
  std::map<double, double> var_at;
  std::map<double, double> cvar_at;
  std::map<double, double> exceedance_at;
};

/// Exponential utility b + (-2/theta) log E exp((-theta/2)(Z - b)), evaluated with a
/// max-shifted log-sum-exp. theta < 0; every atom must be >= lower_bound.
double exponential_utility(const FiniteDistribution& dist, double theta, double lower_bound);

/// Exact CVaR at level alpha in (0,1] via inf_s { s + E max(Z - s, 0) / alpha }.
double cvar_exact(const FiniteDistribution& dist, double alpha);

/// Empirical VaR: the k-th order statistic with k = max(1, ceil((1 - alpha) n)).
double var_estimate(const CostSampleSet& samples, double alpha);

/// Sample Rockafellar-Uryasev CVaR: min over sample values s of s + mean(max(z - s, 0)) / alpha.
double cvar_estimate(const CostSampleSet& samples, double alpha);

/// Mean, unbiased variance, and VaR / CVaR / expected exceedance above VaR per alpha.
EmpiricalStats empirical_stats(const CostSampleSet& samples, std::span<const double> alphas);

/// mean + gamma * variance
double certainty_equivalent(double mean, double variance, double gamma);

namespace detail {
/// Helper shared by the estimators: samples sorted ascending plus suffix sums.
struct SortedSamples {
  std::vector<double> sorted;
  std::vector<double> suffix;  // suffix[j] = sum of sorted[j..n)

  explicit SortedSamples(std::span<const double> samples);
  double var(double alpha) const;
  double cvar(double alpha) const;
  double mean_exceedance(double threshold) const;
};
}  // namespace detail

}  // namespace riskctl
