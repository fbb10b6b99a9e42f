// Compiled with -mavx2 (no -mfma): multiplies and adds stay separate so results
// match the scalar kernels exactly.
#include <immintrin.h>

#include <limits>

#include "riskctl/kernels.hpp"

namespace riskctl::kernels {
namespace {

void gather_interp(double* out, const double* values, const std::uint32_t* index, const double* weight,
                   std::size_t n, std::size_t corners, std::size_t stride) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < corners; ++c) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + c * stride + i));
      const __m256d v = _mm256_i32gather_pd(values, idx, 8);
      const __m256d w = _mm256_loadu_pd(weight + c * stride + i);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, v));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < corners; ++c) acc = acc + weight[c * stride + i] * values[index[c * stride + i]];
    out[i] = acc;
  }
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void max_inplace(double* m, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vm = _mm256_loadu_pd(m + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    // Same selection rule as the scalar path: take x only when x > m.
    const __m256d gt = _mm256_cmp_pd(vx, vm, _CMP_GT_OQ);
    _mm256_storeu_pd(m + i, _mm256_blendv_pd(vm, vx, gt));
  }
  for (; i < n; ++i) m[i] = x[i] > m[i] ? x[i] : m[i];
}

void argmin_update(double* best, std::uint16_t* arg, const double* cand, std::uint16_t control, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vb = _mm256_loadu_pd(best + i);
    const __m256d vc = _mm256_loadu_pd(cand + i);
    const __m256d lt = _mm256_cmp_pd(vc, vb, _CMP_LT_OQ);
    const int mask = _mm256_movemask_pd(lt);
    if (mask == 0) continue;
    _mm256_storeu_pd(best + i, _mm256_blendv_pd(vb, vc, lt));
    for (int lane = 0; lane < 4; ++lane)
      if (mask & (1 << lane)) arg[i + static_cast<std::size_t>(lane)] = control;
  }
  for (; i < n; ++i) {
    if (cand[i] < best[i]) {
      best[i] = cand[i];
      arg[i] = control;
    }
  }
}

double affine_min(const double* base, const double* values, double scale, std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  // min is order-independent for non-NaN inputs, so a lane-parallel reduction is exact.
  double best = base[0] + scale * values[0];
  std::size_t i = 0;
  if (n >= 4) {
    const __m256d vs = _mm256_set1_pd(scale);
    __m256d vbest = _mm256_set1_pd(best);
    for (; i + 4 <= n; i += 4) {
      const __m256d v = _mm256_add_pd(_mm256_loadu_pd(base + i), _mm256_mul_pd(vs, _mm256_loadu_pd(values + i)));
      vbest = _mm256_min_pd(v, vbest);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vbest);
    for (double l : lanes) best = l < best ? l : best;
  }
  for (; i < n; ++i) {
    const double v = base[i] + scale * values[i];
    best = v < best ? v : best;
  }
  return best;
}

std::size_t affine_first_at_most(const double* base, const double* values, double scale, double threshold,
                                 std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vt = _mm256_set1_pd(threshold);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(base + i), _mm256_mul_pd(vs, _mm256_loadu_pd(values + i)));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, vt, _CMP_LE_OQ));
    if (mask != 0) return i + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i)
    if (base[i] + scale * values[i] <= threshold) return i;
  return n;
}

}  // namespace

namespace detail {
const KernelTable* avx2_table() noexcept {
  static const KernelTable t{Isa::kAvx2,    "avx2",     gather_interp, axpy, max_inplace,
                             argmin_update, affine_min, affine_first_at_most};
  return &t;
}
}  // namespace detail

}  // namespace riskctl::kernels
