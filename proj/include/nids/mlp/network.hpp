#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/common/rng.hpp"
#include "nids/io/binary.hpp"
#include "nids/mlp/activation.hpp"
#include "nids/mlp/loss.hpp"

namespace nids::mlp {

/// Parameters in a fully connected stack: sum over adjacent layers of
/// n_i * n_{i+1} weights plus n_{i+1} biases.
std::size_t weight_count(std::span<const std::size_t> sizes);

/// Argmax over class scores, ties to the lowest index.
std::size_t predict_class(std::span<const double> scores);

/// One pattern's contribution during training.
struct PatternStats {
  double squared_error = 0.0;  // ||t - s||^2, what the epoch history reports
  double loss = 0.0;           // value of the training objective
  bool correct = false;
};

/// Scratch buffers for one pass through a dense stack. values[0] is the
/// input and values[l + 1] the activated output of layer l.
struct DenseTrace {
  std::vector<std::vector<double>> values;
  std::vector<double> delta;
  std::vector<double> previous;
  std::vector<double> target;
  std::vector<double> output_grad;
};

/// Shape of a fully connected stack, without storage. Parameters are read
/// from a caller-supplied flat span, layer by layer: the out x in weight
/// block (row-major, one row per neuron) followed by the out biases. Deep
/// models use this to keep their dense head inside one parameter vector.
class DenseLayout {
 public:
  DenseLayout() = default;
  /// `activations` has one entry per non-input layer; softmax is only
  /// allowed on the last.
  DenseLayout(std::vector<std::size_t> sizes, std::vector<Activation> activations);

  std::size_t input_size() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.empty() ? 0 : sizes_.back(); }
  std::size_t layer_count() const noexcept { return activations_.size(); }
  std::size_t parameter_count() const noexcept { return total_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  const std::vector<Activation>& activations() const noexcept { return activations_; }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }

  /// Glorot-uniform weights, zero biases.
  void initialize(std::span<double> params, Rng& rng) const;

  DenseTrace make_trace() const;

  /// Throws std::invalid_argument when |x| differs from the input size.
  const std::vector<double>& forward(std::span<const double> params, std::span<const double> x,
                                     DenseTrace& trace) const;

  /// Reverse pass after `forward` filled `trace`. `output_grad` holds dL/ds
  /// for the outputs and is overwritten. Parameter gradients are added to
  /// `grad`; dL/dx is written to `input_grad` when it is non-empty.
  void backward(std::span<const double> params, DenseTrace& trace, std::span<double> output_grad,
                std::span<double> grad, std::span<double> input_grad = {}) const;

  void save(io::Writer& out) const;
  static DenseLayout load(io::Reader& in);

  friend bool operator==(const DenseLayout&, const DenseLayout&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// Fully connected feed-forward network owning its parameters.
class DenseNetwork {
 public:
  using Trace = DenseTrace;
  using Workspace = DenseTrace;

  DenseNetwork() = default;
  /// Parameters start at zero.
  DenseNetwork(std::vector<std::size_t> sizes, std::vector<Activation> activations)
      : layout_(std::move(sizes), std::move(activations)), params_(layout_.parameter_count(), 0.0) {}

  /// ReLU hidden layers and a softmax output, Glorot-uniform initialised.
  static DenseNetwork classifier(std::size_t inputs, const std::vector<std::size_t>& hidden,
                                 std::size_t classes, std::uint64_t seed);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, biases zero.
  void initialize(std::uint64_t seed);

  const DenseLayout& layout() const noexcept { return layout_; }
  std::size_t input_size() const noexcept { return layout_.input_size(); }
  std::size_t output_size() const noexcept { return layout_.output_size(); }
  std::size_t class_count() const noexcept { return output_size(); }
  std::size_t layer_count() const noexcept { return layout_.layer_count(); }
  const std::vector<std::size_t>& sizes() const noexcept { return layout_.sizes(); }
  const std::vector<Activation>& activations() const noexcept { return layout_.activations(); }

  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  Trace make_workspace() const { return layout_.make_trace(); }

  const std::vector<double>& forward(std::span<const double> x, Trace& trace) const {
    return layout_.forward(params_, x, trace);
  }
  std::vector<double> forward(std::span<const double> x) const;

  void backward(Trace& trace, std::span<double> output_grad, std::span<double> grad,
                std::span<double> input_grad = {}) const {
    layout_.backward(params_, trace, output_grad, grad, input_grad);
  }

  /// forward + loss + backward for one labelled pattern (one-hot target).
  PatternStats accumulate_gradient(std::span<const double> x, std::size_t label, Loss loss,
                                   std::span<double> grad, Trace& trace, Rng& rng) const;

  std::span<const double> scores(std::span<const double> x, Trace& trace) const {
    return forward(x, trace);
  }

  void save(io::Writer& out) const;
  static DenseNetwork load(io::Reader& in);

  friend bool operator==(const DenseNetwork&, const DenseNetwork&) = default;

 private:
  DenseLayout layout_;
  std::vector<double> params_;
};

/// Loss, its gradient and the argmax check for one pattern whose output
/// scores sit in `trace`. Fills trace.output_grad with dL/ds.
PatternStats score_pattern(std::span<const double> s, std::size_t label, Loss loss, DenseTrace& trace);

/// Gradient of the summed loss over the rows of `x` (targets one row per
/// pattern) w.r.t. every parameter. Returns the summed loss.
double backprop(const DenseNetwork& net, const Matrix& x, const Matrix& targets, Loss loss,
                std::span<double> grad);

}  // namespace nids::mlp
