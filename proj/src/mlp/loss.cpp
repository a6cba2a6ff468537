#include "nids/mlp/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nids::mlp {

std::string_view to_string(Loss l) { return l == Loss::least_squares ? "least_squares" : "cross_entropy"; }

Loss parse_loss(std::string_view name) {
  if (name == "least_squares" || name == "mse") return Loss::least_squares;
  if (name == "cross_entropy") return Loss::cross_entropy;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

double squared_error(std::span<const double> output, std::span<const double> target) {
  double e = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = target[i] - output[i];
    e += d * d;
  }
  return e;
}

LossValue mse_loss(const Matrix& outputs, const Matrix& targets) {
  if (outputs.rows() == 0) throw std::invalid_argument("mse_loss: empty pattern set");
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols()) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  LossValue v;
  for (std::size_t p = 0; p < outputs.rows(); ++p) v.sum += squared_error(outputs.row(p), targets.row(p));
  v.mean = v.sum / static_cast<double>(outputs.rows());
  return v;
}

double loss_gradient(Loss loss, std::span<const double> output, std::span<const double> target,
                     std::span<double> grad) {
  if (loss == Loss::least_squares) {
    for (std::size_t i = 0; i < output.size(); ++i) grad[i] = 2.0 * (output[i] - target[i]);
    return squared_error(output, target);
  }
  // probabilities are floored so a saturated wrong class gives a large but finite loss
  constexpr double floor = 1e-300;
  double value = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double s = std::max(output[i], floor);
    grad[i] = -target[i] / s;
    if (target[i] != 0.0) value -= target[i] * std::log(s);
  }
  return value;
}

}  // namespace nids::mlp
