#include "nids/simd/kernels.hpp"

namespace nids::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void move_toward_scalar(double rate, const double* target, double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) m[i] += rate * (target[i] - m[i]);
}

constexpr KernelTable kScalar{
    "scalar", dot_scalar, squared_distance_scalar, axpy_scalar, move_toward_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace nids::simd
