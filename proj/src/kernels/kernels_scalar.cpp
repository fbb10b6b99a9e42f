#include <algorithm>

#include <limits>

#include "riskctl/kernels.hpp"

namespace riskctl::kernels {
namespace {

void gather_interp(double* out, const double* values, const std::uint32_t* index, const double* weight,
                   std::size_t n, std::size_t corners, std::size_t stride) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < corners; ++c) acc = acc + weight[c * stride + i] * values[index[c * stride + i]];
    out[i] = acc;
  }
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void max_inplace(double* m, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) m[i] = x[i] > m[i] ? x[i] : m[i];
}

void argmin_update(double* best, std::uint16_t* arg, const double* cand, std::uint16_t control, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (cand[i] < best[i]) {
      best[i] = cand[i];
      arg[i] = control;
    }
  }
}

double affine_min(const double* base, const double* values, double scale, std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  double best = base[0] + scale * values[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double v = base[i] + scale * values[i];
    best = v < best ? v : best;
  }
  return best;
}

std::size_t affine_first_at_most(const double* base, const double* values, double scale, double threshold,
                                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (base[i] + scale * values[i] <= threshold) return i;
  return n;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable t{Isa::kScalar, "scalar", gather_interp,   axpy, max_inplace,
                             argmin_update, affine_min, affine_first_at_most};
  return t;
}

}  // namespace riskctl::kernels
