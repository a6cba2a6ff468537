#include <cstdlib>
#include <string_view>

#include "nids/simd/kernels.hpp"

namespace nids::simd {

namespace detail {
#if defined(NIDS_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(NIDS_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

const KernelTable* avx2_kernels() noexcept {
#if defined(NIDS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#if defined(NIDS_HAVE_NEON)
  return &detail::kNeonTable;  // baseline on AArch64
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* forced = std::getenv("NIDS_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const auto* t = avx2_kernels()) return *t;
    if (const auto* t = neon_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace nids::simd
