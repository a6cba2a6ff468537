#pragma once

#include <span>
#include <string>
#include <string_view>

namespace nids::mlp {

enum class Activation { relu, softmax, sigmoid, tanh, linear };

std::string_view to_string(Activation a);
/// Throws std::invalid_argument on an unknown name.
Activation parse_activation(std::string_view name);

/// In-place activation of a layer's pre-activations.
void activate(Activation a, std::span<double> z);

/// Converts dL/ds (gradient w.r.t. the activated outputs `s`) into dL/dz in
/// place. Softmax applies its full Jacobian. ReLU'(0) is taken as 0.
void backpropagate_activation(Activation a, std::span<const double> s, std::span<double> grad);

}  // namespace nids::mlp
