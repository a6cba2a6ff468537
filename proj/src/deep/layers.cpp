#include "nids/deep/layers.hpp"

#include <stdexcept>

#include "nids/simd/kernels.hpp"

namespace nids::deep {

Matrix conv1d_forward(const ConvSpec& spec, std::span<const double> weights, std::span<const double> bias,
                      std::span<const double> x) {
  if (spec.kernel == 0 || x.size() < spec.kernel) {
    throw std::invalid_argument("conv1d: input shorter than the kernel");
  }
  const auto len = spec.output_length(x.size());
  Matrix out(spec.filters, len);
  const auto& k = simd::active();
  for (std::size_t f = 0; f < spec.filters; ++f) {
    const double* w = weights.data() + f * spec.kernel;
    for (std::size_t p = 0; p < len; ++p) out(f, p) = bias[f] + k.dot(w, x.data() + p, spec.kernel);
  }
  return out;
}

std::vector<double> maxpool1d(std::span<const double> x, std::size_t size, std::vector<std::size_t>* winners) {
  if (x.empty() || size == 0) throw std::invalid_argument("maxpool1d: empty input");
  const std::size_t n = x.size() / size;
  std::vector<double> out(n);
  if (winners) winners->resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    std::size_t best = w * size;
    for (std::size_t i = best + 1; i < (w + 1) * size; ++i) {
      if (x[i] > x[best]) best = i;
    }
    out[w] = x[best];
    if (winners) (*winners)[w] = best;
  }
  return out;
}

void dropout_apply(std::span<double> x, double rate, Rng& rng, bool training, std::vector<double>* mask) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must lie in [0, 1)");
  if (mask) mask->assign(x.size(), 1.0);
  if (!training || rate == 0.0) return;
  const double keep = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng.uniform() < rate ? 0.0 : keep;
    x[i] *= m;
    if (mask) (*mask)[i] = m;
  }
}

}  // namespace nids::deep
