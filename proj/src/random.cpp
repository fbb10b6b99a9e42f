#include "riskctl/random.hpp"

namespace riskctl {

DisturbanceSampler::DisturbanceSampler(const DisturbanceTable& table) : support_(table.support) {
  double acc = 0.0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (table.probabilities[k] == 0.0) continue;
    acc += table.probabilities[k];
    cdf_.push_back(acc);
    atom_.push_back(k);
  }
}

std::size_t DisturbanceSampler::index(double u) const noexcept {
  for (std::size_t a = 0; a + 1 < cdf_.size(); ++a)
    if (u < cdf_[a]) return atom_[a];
  return atom_.back();
}

}  // namespace riskctl
