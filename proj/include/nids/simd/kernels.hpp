#pragma once

// Data-parallel inner loops shared by the dense, competitive and recurrent
// learners. Each kernel has a scalar reference implementation and optional
// AVX2/FMA and NEON variants; one table is selected at first use based on
// the running CPU. Setting NIDS_SIMD=scalar in the environment pins the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace nids::simd {

struct KernelTable {
  std::string_view name;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// m[i] += rate * (target[i] - m[i])
  void (*move_toward)(double rate, const double* target, double* m, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// Null when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

/// Table used by the convenience wrappers below; fixed for the process.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void move_toward(double rate, std::span<const double> target, std::span<double> m) {
  active().move_toward(rate, target.data(), m.data(), m.size());
}

/// y = W x (+ bias), W row-major rows x cols.
inline void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<const double> bias, std::span<double> y) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = k.dot(w.data() + r * cols, x.data(), cols) + (bias.empty() ? 0.0 : bias[r]);
  }
}

/// y += W^T g, W row-major rows x cols.
inline void gemv_transposed_accumulate(std::span<const double> w, std::size_t rows,
                                       std::size_t cols, std::span<const double> g,
                                       std::span<double> y) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], w.data() + r * cols, y.data(), cols);
  }
}

/// G += g x^T, G row-major rows x cols.
inline void outer_accumulate(std::span<const double> g, std::span<const double> x,
                             std::span<double> out) {
  const auto& k = active();
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < g.size(); ++r) {
    if (g[r] != 0.0) k.axpy(g[r], x.data(), out.data() + r * cols, cols);
  }
}

}  // namespace nids::simd
