#pragma once

#include <span>
#include <string_view>

#include "nids/common/matrix.hpp"

namespace nids::mlp {

/// least_squares is the per-pattern ||t - s||^2 summed over the training
/// set; cross_entropy is -sum t log s.
enum class Loss { least_squares, cross_entropy };

std::string_view to_string(Loss l);
Loss parse_loss(std::string_view name);

double squared_error(std::span<const double> output, std::span<const double> target);

struct LossValue {
  double sum = 0.0;   // summed over patterns
  double mean = 0.0;  // sum / number of patterns
};

/// Least-squares error over a set of patterns (one per row). Throws
/// std::invalid_argument on an empty set or mismatched shapes.
LossValue mse_loss(const Matrix& outputs, const Matrix& targets);

/// Value of `loss` for one pattern and its gradient w.r.t. the outputs.
double loss_gradient(Loss loss, std::span<const double> output, std::span<const double> target,
                     std::span<double> grad);

}  // namespace nids::mlp
