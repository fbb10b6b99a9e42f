#pragma once

#include <cstdint>
#include <vector>

#include "riskctl/system_model.hpp"

namespace riskctl {

inline std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 sequence keyed on (seed, stream). Trajectory i of a run uses stream i, so
/// every trajectory sees the same draws however the work is split across threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(splitmix64_mix(seed ^ splitmix64_mix(stream + kGamma))) {}

  std::uint64_t next() noexcept {
    state_ += kGamma;
    return splitmix64_mix(state_);
  }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

/// Inverse-CDF sampling of disturbance atoms.
class DisturbanceSampler {
 public:
  explicit DisturbanceSampler(const DisturbanceTable& table);
  std::size_t index(double u) const noexcept;
  double draw(RandomStream& rng) const noexcept { return support_[index(rng.uniform())]; }

 private:
  std::vector<double> support_;
  std::vector<double> cdf_;
  std::vector<std::size_t> atom_;  // atoms with positive probability
};

}  // namespace riskctl
