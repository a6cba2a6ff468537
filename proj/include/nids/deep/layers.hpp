#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/common/rng.hpp"

namespace nids::deep {

/// Single-channel 1-D convolution, stride 1, no padding.
struct ConvSpec {
  std::size_t filters = 7;
  std::size_t kernel = 4;

  std::size_t output_length(std::size_t input_length) const { return input_length - kernel + 1; }
  std::size_t parameter_count() const { return filters * kernel + filters; }

  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// Valid cross-correlation: out(f, p) = b[f] + sum_k w[f * kernel + k] * x[p + k].
/// Returns filters x (|x| - kernel + 1) pre-activation maps. Throws
/// std::invalid_argument when x is shorter than the kernel.
Matrix conv1d_forward(const ConvSpec& spec, std::span<const double> weights, std::span<const double> bias,
                      std::span<const double> x);

/// Non-overlapping max windows; a trailing partial window is dropped.
/// `winners`, when given, receives the argmax position of each window.
/// Throws std::invalid_argument on empty input or size 0.
std::vector<double> maxpool1d(std::span<const double> x, std::size_t size,
                              std::vector<std::size_t>* winners = nullptr);

/// Inverted dropout. In training each element is zeroed with probability
/// `rate` and survivors are scaled by 1 / (1 - rate); otherwise identity.
/// `mask`, when given, receives the per-element multiplier.
void dropout_apply(std::span<double> x, double rate, Rng& rng, bool training,
                   std::vector<double>* mask = nullptr);

}  // namespace nids::deep
