#include <atomic>
#include <cstdlib>
#include <string>

#include "epidyn/kernels.hpp"

namespace epidyn::kernels {

namespace detail {
#if defined(EPIDYN_BUILD_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(EPIDYN_BUILD_NEON)
const KernelTable& neon_kernels();
#endif
}  // namespace detail

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_table() {
#if defined(EPIDYN_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(EPIDYN_BUILD_NEON)
  // Advanced SIMD is mandatory on AArch64.
  return &detail::neon_kernels();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* select_default() {
  if (const char* env = std::getenv("EPIDYN_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return &scalar_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{select_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

const KernelTable& set_active(const KernelTable& table) {
  return *slot().exchange(&table, std::memory_order_acq_rel);
}

}  // namespace epidyn::kernels
