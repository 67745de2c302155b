#include <arm_neon.h>

#include "fairtopk/kernels.hpp"

namespace fairtopk::kernels {
namespace {

void axpy_neon(double* dst, const double* src, std::size_t n, double scale) {
  const float64x2_t s = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f64(dst + i, vfmaq_f64(vld1q_f64(dst + i), s, vld1q_f64(src + i)));
    vst1q_f64(dst + i + 2, vfmaq_f64(vld1q_f64(dst + i + 2), s, vld1q_f64(src + i + 2)));
  }
  for (; i < n; ++i) dst[i] += scale * src[i];
}

void lattice_step_neon(double* dst, const double* src, std::size_t n, double stay,
                       double advance) {
  if (n == 0) {
    dst[0] = 0.0;
    return;
  }
  dst[0] = stay * src[0];
  const float64x2_t vs = vdupq_n_f64(stay);
  const float64x2_t va = vdupq_n_f64(advance);
  std::size_t i = 1;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(dst + i, vfmaq_f64(vmulq_f64(va, vld1q_f64(src + i - 1)), vs, vld1q_f64(src + i)));
  }
  for (; i < n; ++i) dst[i] = stay * src[i] + advance * src[i - 1];
  dst[n] = advance * src[n - 1];
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

constexpr KernelTable kNeon{"neon", axpy_neon, lattice_step_neon, dot_neon};

}  // namespace

const KernelTable& neon_kernel_table() { return kNeon; }

}  // namespace fairtopk::kernels
