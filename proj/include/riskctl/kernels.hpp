#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops of the dynamic-programming solvers.
//
// Every kernel has a scalar reference implementation and may have SIMD variants.
// Variants perform the same floating-point operations in the same order (no FMA
// contraction), so all variants of a kernel are bit-for-bit equivalent; the test
// suite checks this. The active table is chosen once at startup from the CPU
// features, and can be forced with RISKCTL_SIMD=scalar|avx2.
namespace riskctl::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  /// out[i] = sum_c weight[c*stride + i] * values[index[c*stride + i]], corners accumulated in order.
  void (*gather_interp)(double* out, const double* values, const std::uint32_t* index, const double* weight,
                        std::size_t n, std::size_t corners, std::size_t stride);

  /// y[i] = y[i] + a * x[i]
  void (*axpy)(double* y, double a, const double* x, std::size_t n);

  /// m[i] = max(m[i], x[i])
  void (*max_inplace)(double* m, const double* x, std::size_t n);

  /// Where cand[i] < best[i]: best[i] = cand[i], arg[i] = control. Ties keep the earlier control.
  void (*argmin_update)(double* best, std::uint16_t* arg, const double* cand, std::uint16_t control, std::size_t n);

  /// min over i of base[i] + scale * values[i]; +inf when n = 0.
  double (*affine_min)(const double* base, const double* values, double scale, std::size_t n);

  /// First i with base[i] + scale * values[i] <= threshold, or n.
  std::size_t (*affine_first_at_most)(const double* base, const double* values, double scale, double threshold,
                                      std::size_t n);
};

const KernelTable& scalar_table() noexcept;
bool supported(Isa isa) noexcept;
/// Throws riskctl::InputError when the ISA is not available on this CPU or build.
const KernelTable& table(Isa isa);
/// Table selected for this process.
const KernelTable& active();
Isa parse_isa(std::string_view name);

namespace detail {
const KernelTable* avx2_table() noexcept;
}

}  // namespace riskctl::kernels
