#include <cstdlib>
#include <string>

#include "riskctl/error.hpp"
#include "riskctl/kernels.hpp"

namespace riskctl::kernels {

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(RISKCTL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw InputError("SIMD kernel set is not supported on this CPU/build");
  switch (isa) {
    case Isa::kScalar:
      return scalar_table();
    case Isa::kAvx2:
#if defined(RISKCTL_HAVE_AVX2)
      return *detail::avx2_table();
#else
      break;
#endif
  }
  return scalar_table();
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  throw InputError("unknown kernel set '" + std::string(name) + "' (expected scalar or avx2)");
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    if (const char* forced = std::getenv("RISKCTL_SIMD"); forced && *forced) return table(parse_isa(forced));
    if (supported(Isa::kAvx2)) return table(Isa::kAvx2);
    return scalar_table();
  }();
  return chosen;
}

}  // namespace riskctl::kernels
