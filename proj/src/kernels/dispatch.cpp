#include <cstdlib>
#include <string_view>

#include "fairtopk/kernels.hpp"

namespace fairtopk::kernels {

#if defined(FAIRTOPK_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif
#if defined(FAIRTOPK_HAVE_NEON)
const KernelTable& neon_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(FAIRTOPK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(FAIRTOPK_HAVE_NEON)
  // NEON is architectural on aarch64.
  return &neon_kernel_table();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* k = avx2_kernels()) out.push_back(k);
  if (const auto* k = neon_kernels()) out.push_back(k);
  return out;
}

namespace {

const KernelTable& resolve() {
  if (const char* forced = std::getenv("FAIRTOPK_KERNELS")) {
    const std::string_view want{forced};
    for (const auto* k : available_kernels()) {
      if (want == k->name) return *k;
    }
  }
  if (const auto* k = avx2_kernels()) return *k;
  if (const auto* k = neon_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = resolve();
  return table;
}

}  // namespace fairtopk::kernels
