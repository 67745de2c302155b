#pragma once
// Data-parallel inner loops shared by the statistical routines.
//
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2+FMA on x86-64, NEON on aarch64) are compiled in separate translation
// units and picked at runtime. Set FAIRTOPK_KERNELS=scalar|avx2|neon to force
// a variant.

#include <cstddef>
#include <span>
#include <vector>

namespace fairtopk::kernels {

// dst[i] += scale * src[i]
using AxpyFn = void (*)(double* dst, const double* src, std::size_t n, double scale);

// One Bernoulli trial applied to a count distribution of length n:
// dst[0] = stay*src[0], dst[i] = stay*src[i] + advance*src[i-1], dst[n] = advance*src[n-1].
// dst must hold n + 1 values and must not alias src.
using LatticeStepFn = void (*)(double* dst, const double* src, std::size_t n, double stay,
                               double advance);

using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
  const char* name;
  AxpyFn axpy;
  LatticeStepFn lattice_step;
  DotFn dot;
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

// The variant used by the library, resolved once.
const KernelTable& active_kernels();

inline void axpy(std::span<double> dst, std::span<const double> src, double scale) {
  active_kernels().axpy(dst.data(), src.data(), src.size(), scale);
}

inline void lattice_step(std::span<double> dst, std::span<const double> src, double stay,
                         double advance) {
  active_kernels().lattice_step(dst.data(), src.data(), src.size(), stay, advance);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace fairtopk::kernels
