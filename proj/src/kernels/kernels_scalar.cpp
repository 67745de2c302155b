#include "fairtopk/kernels.hpp"

namespace fairtopk::kernels {
namespace {

void axpy_scalar(double* dst, const double* src, std::size_t n, double scale) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += scale * src[i];
}

void lattice_step_scalar(double* dst, const double* src, std::size_t n, double stay,
                         double advance) {
  if (n == 0) {
    dst[0] = 0.0;
    return;
  }
  dst[0] = stay * src[0];
  for (std::size_t i = 1; i < n; ++i) dst[i] = stay * src[i] + advance * src[i - 1];
  dst[n] = advance * src[n - 1];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

constexpr KernelTable kScalar{"scalar", axpy_scalar, lattice_step_scalar, dot_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace fairtopk::kernels
