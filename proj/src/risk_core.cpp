#include "riskctl/risk_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "riskctl/error.hpp"

namespace riskctl {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1], got " + std::to_string(alpha));
}

// ceil(x) for x = (level * n), snapping values within round-off of an integer.
std::size_t ceil_count(double level, std::size_t n) {
  const double x = level * static_cast<double>(n);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InputError("distribution needs at least one atom");
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.value)) throw InputError("distribution atom value is not finite");
    if (!(a.probability >= 0.0) || !std::isfinite(a.probability))
      throw InputError("distribution probabilities must be finite and non-negative");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("distribution probabilities must sum to 1");
}

double FiniteDistribution::mean() const noexcept {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.probability * a.value;
  return m;
}

double FiniteDistribution::variance() const noexcept {
  const double m = mean();
  double v = 0.0;
  for (const Atom& a : atoms_) v += a.probability * (a.value - m) * (a.value - m);
  return v;
}

double FiniteDistribution::min_value() const noexcept {
  double lo = std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) lo = std::min(lo, a.value);
  return lo;
}

double FiniteDistribution::max_value() const noexcept {
  double hi = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_)
    if (a.probability > 0.0) hi = std::max(hi, a.value);
  return hi;
}

FiniteDistribution FiniteDistribution::shifted(double shift) const {
  std::vector<Atom> out = atoms_;
  for (Atom& a : out) a.value += shift;
  return FiniteDistribution(std::move(out));
}

CostSampleSet::CostSampleSet(std::vector<double> s, std::uint64_t sd) : samples(std::move(s)), seed(sd) {
  if (samples.empty()) throw InputError("cost sample set is empty");
}

double exponential_utility(const FiniteDistribution& dist, double theta, double lower_bound) {
  if (!(theta < 0.0)) throw ParameterError("exponential utility needs theta < 0, got " + std::to_string(theta));
  if (dist.min_value() < lower_bound) throw DomainError("distribution has an atom below the lower bound");
  const double beta = -theta / 2.0;
  const double shift = dist.max_value() - lower_bound;
  double sum = 0.0;
  for (const Atom& a : dist.atoms()) {
    if (a.probability == 0.0) continue;
    sum += a.probability * std::expm1(beta * ((a.value - lower_bound) - shift));
  }
  return lower_bound + shift + std::log1p(sum) / beta;
}

double cvar_exact(const FiniteDistribution& dist, double alpha) {
  check_alpha(alpha);
  std::vector<Atom> atoms(dist.atoms().begin(), dist.atoms().end());
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  const std::size_t n = atoms.size();
  // tail_p[j] = sum_{i>=j} p_i, tail_pz[j] = sum_{i>=j} p_i z_i
  std::vector<double> tail_p(n + 1, 0.0), tail_pz(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    tail_p[j] = tail_p[j + 1] + atoms[j].probability;
    tail_pz[j] = tail_pz[j + 1] + atoms[j].probability * atoms[j].value;
  }
  auto objective_at_atom = [&](std::size_t j) {
    const double s = atoms[j].value;
    const double excess = tail_pz[j + 1] - s * tail_p[j + 1];
    return s + std::max(excess, 0.0) / alpha;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) best = std::min(best, objective_at_atom(j));
  double excess0 = 0.0;
  for (const Atom& a : atoms) excess0 += a.probability * std::max(a.value, 0.0);
  return std::min(best, excess0 / alpha);
}

namespace detail {

SortedSamples::SortedSamples(std::span<const double> samples) : sorted(samples.begin(), samples.end()) {
  if (sorted.empty()) throw InputError("cost sample set is empty");
  std::sort(sorted.begin(), sorted.end());
  suffix.assign(sorted.size() + 1, 0.0);
  for (std::size_t j = sorted.size(); j-- > 0;) suffix[j] = suffix[j + 1] + sorted[j];
}

double SortedSamples::var(double alpha) const {
  check_alpha(alpha);
  const std::size_t n = sorted.size();
  const std::size_t k = std::clamp<std::size_t>(ceil_count(1.0 - alpha, n), 1, n);
  return sorted[k - 1];
}

double SortedSamples::cvar(double alpha) const {
  check_alpha(alpha);
  const std::size_t n = sorted.size();
  const double scale = 1.0 / (alpha * static_cast<double>(n));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (j + 1 < n && sorted[j + 1] == sorted[j]) continue;  // same candidate s
    const double s = sorted[j];
    const double excess = suffix[j + 1] - static_cast<double>(n - j - 1) * s;
    best = std::min(best, s + std::max(excess, 0.0) * scale);
  }
  return best;
}

double SortedSamples::mean_exceedance(double threshold) const {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), threshold);
  const std::size_t j = static_cast<std::size_t>(it - sorted.begin());
  const double excess = suffix[j] - static_cast<double>(sorted.size() - j) * threshold;
  return std::max(excess, 0.0) / static_cast<double>(sorted.size());
}

}  // namespace detail

double var_estimate(const CostSampleSet& samples, double alpha) {
  return detail::SortedSamples(samples.samples).var(alpha);
}

double cvar_estimate(const CostSampleSet& samples, double alpha) {
  return detail::SortedSamples(samples.samples).cvar(alpha);
}

EmpiricalStats empirical_stats(const CostSampleSet& samples, std::span<const double> alphas) {
  const std::size_t n = samples.samples.size();
  if (n < 2) throw InputError("variance needs at least 2 samples");
  EmpiricalStats stats;
  const double mean = std::accumulate(samples.samples.begin(), samples.samples.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double z : samples.samples) ss += (z - mean) * (z - mean);
  stats.mean = mean;
  stats.variance = ss / static_cast<double>(n - 1);
  const detail::SortedSamples sorted(samples.samples);
  for (double alpha : alphas) {
    const double v = sorted.var(alpha);
    stats.var_at[alpha] = v;
    stats.exceedance_at[alpha] = sorted.mean_exceedance(v);
    stats.cvar_at[alpha] = sorted.cvar(alpha);
  }
  return stats;
}

double certainty_equivalent(double mean, double variance, double gamma) {
  if (variance < 0.0) throw DomainError("variance must be non-negative");
  return mean + gamma * variance;
}

}  // namespace riskctl
