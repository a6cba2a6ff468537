#pragma once

#include <span>
#include <vector>

namespace nids::eval {

/// Quantile with linear interpolation between order statistics: position
/// q * (n - 1) in the sorted sample. Throws std::invalid_argument on an empty
/// sample or q outside [0, 1].
double quantile(std::span<const double> values, double q);

struct MseStats {
  double median = 0.0;
  double iqr = 0.0;
};

MseStats mse_stats(std::span<const double> history);

/// Epoch-wise mean of several histories, truncated to the shortest one.
std::vector<double> mean_history(std::span<const std::vector<double>> histories);

}  // namespace nids::eval
