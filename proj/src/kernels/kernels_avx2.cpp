// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "fairtopk/kernels.hpp"

namespace fairtopk::kernels {
namespace {

void axpy_avx2(double* dst, const double* src, std::size_t n, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_loadu_pd(dst + i);
    __m256d d1 = _mm256_loadu_pd(dst + i + 4);
    d0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(src + i), d0);
    d1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(src + i + 4), d1);
    _mm256_storeu_pd(dst + i, d0);
    _mm256_storeu_pd(dst + i + 4, d1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_loadu_pd(dst + i);
    d = _mm256_fmadd_pd(s, _mm256_loadu_pd(src + i), d);
    _mm256_storeu_pd(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += scale * src[i];
}

void lattice_step_avx2(double* dst, const double* src, std::size_t n, double stay,
                       double advance) {
  if (n == 0) {
    dst[0] = 0.0;
    return;
  }
  dst[0] = stay * src[0];
  const __m256d vs = _mm256_set1_pd(stay);
  const __m256d va = _mm256_set1_pd(advance);
  std::size_t i = 1;
  for (; i + 4 <= n; i += 4) {
    const __m256d cur = _mm256_loadu_pd(src + i);
    const __m256d prev = _mm256_loadu_pd(src + i - 1);
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(vs, cur, _mm256_mul_pd(va, prev)));
  }
  for (; i < n; ++i) dst[i] = stay * src[i] + advance * src[i - 1];
  dst[n] = advance * src[n - 1];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

constexpr KernelTable kAvx2{"avx2", axpy_avx2, lattice_step_avx2, dot_avx2};

}  // namespace

const KernelTable& avx2_kernel_table() { return kAvx2; }

}  // namespace fairtopk::kernels
