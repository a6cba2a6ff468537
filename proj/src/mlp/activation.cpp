#include "nids/mlp/activation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nids::mlp {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::softmax: return "softmax";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::relu, Activation::softmax, Activation::sigmoid, Activation::tanh, Activation::linear}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

void activate(Activation a, std::span<double> z) {
  switch (a) {
    case Activation::relu:
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::sigmoid:
      for (auto& v : z) v = 1.0 / (1.0 + std::exp(-v));
      break;
    case Activation::tanh:
      for (auto& v : z) v = std::tanh(v);
      break;
    case Activation::linear:
      break;
    case Activation::softmax: {
      if (z.empty()) break;
      const double peak = *std::max_element(z.begin(), z.end());
      double total = 0.0;
      for (auto& v : z) total += (v = std::exp(v - peak));
      for (auto& v : z) v /= total;
      break;
    }
  }
}

void backpropagate_activation(Activation a, std::span<const double> s, std::span<double> grad) {
  switch (a) {
    case Activation::relu:
      for (std::size_t i = 0; i < s.size(); ++i) grad[i] = s[i] > 0.0 ? grad[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < s.size(); ++i) grad[i] *= s[i] * (1.0 - s[i]);
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < s.size(); ++i) grad[i] *= 1.0 - s[i] * s[i];
      break;
    case Activation::linear:
      break;
    case Activation::softmax: {
      double weighted = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) weighted += s[i] * grad[i];
      for (std::size_t i = 0; i < s.size(); ++i) grad[i] = s[i] * (grad[i] - weighted);
      break;
    }
  }
}

}  // namespace nids::mlp
