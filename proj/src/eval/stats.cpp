#include "nids/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nids::eval {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MseStats mse_stats(std::span<const double> history) {
  if (history.empty()) throw std::invalid_argument("mse_stats: empty history");
  MseStats s;
  s.median = quantile(history, 0.5);
  s.iqr = quantile(history, 0.75) - quantile(history, 0.25);
  return s;
}

std::vector<double> mean_history(std::span<const std::vector<double>> histories) {
  if (histories.empty()) return {};
  std::size_t len = histories.front().size();
  for (const auto& h : histories) len = std::min(len, h.size());
  std::vector<double> out(len, 0.0);
  for (const auto& h : histories) {
    for (std::size_t e = 0; e < len; ++e) out[e] += h[e];
  }
  for (auto& v : out) v /= static_cast<double>(histories.size());
  return out;
}

}  // namespace nids::eval
