#include "nids/mlp/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nids/common/argmax.hpp"
#include "nids/common/error.hpp"
#include "nids/simd/kernels.hpp"

namespace nids::mlp {

std::size_t weight_count(std::span<const std::size_t> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("weight_count: need at least two layers");
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) n += sizes[i] * sizes[i + 1] + sizes[i + 1];
  return n;
}

std::size_t predict_class(std::span<const double> scores) { return argmax(scores); }

DenseLayout::DenseLayout(std::vector<std::size_t> sizes, std::vector<Activation> activations)
    : sizes_(std::move(sizes)), activations_(std::move(activations)) {
  if (sizes_.size() < 2) throw std::invalid_argument("dense stack: need at least two layers");
  if (activations_.size() != sizes_.size() - 1) {
    throw std::invalid_argument("dense stack: one activation per non-input layer");
  }
  for (auto s : sizes_) {
    if (s == 0) throw std::invalid_argument("dense stack: empty layer");
  }
  for (std::size_t l = 0; l + 1 < activations_.size(); ++l) {
    if (activations_[l] == Activation::softmax) {
      throw std::invalid_argument("dense stack: softmax is only allowed on the output layer");
    }
  }
  for (std::size_t l = 0; l < activations_.size(); ++l) {
    offsets_.push_back(total_);
    total_ += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
}

void DenseLayout::initialize(std::span<double> params, Rng& rng) const {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
    for (std::size_t i = weight_offset(l); i < bias_offset(l); ++i) params[i] = rng.uniform(-limit, limit);
    std::fill_n(params.begin() + static_cast<std::ptrdiff_t>(bias_offset(l)), sizes_[l + 1], 0.0);
  }
}

DenseTrace DenseLayout::make_trace() const {
  DenseTrace t;
  t.values.resize(sizes_.size());
  for (std::size_t l = 0; l < sizes_.size(); ++l) t.values[l].resize(sizes_[l]);
  const auto widest = sizes_.empty() ? 0 : *std::max_element(sizes_.begin(), sizes_.end());
  t.delta.resize(widest);
  t.previous.resize(widest);
  t.target.resize(output_size());
  t.output_grad.resize(output_size());
  return t;
}

const std::vector<double>& DenseLayout::forward(std::span<const double> params, std::span<const double> x,
                                                DenseTrace& trace) const {
  if (x.size() != input_size()) {
    throw std::invalid_argument("dense stack: input has " + std::to_string(x.size()) +
                                " values, expected " + std::to_string(input_size()));
  }
  if (trace.values.size() != sizes_.size()) trace = make_trace();
  std::copy(x.begin(), x.end(), trace.values[0].begin());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    auto& out = trace.values[l + 1];
    simd::gemv(params.subspan(weight_offset(l), sizes_[l] * sizes_[l + 1]), sizes_[l + 1], sizes_[l],
               trace.values[l], params.subspan(bias_offset(l), sizes_[l + 1]), out);
    activate(activations_[l], out);
  }
  return trace.values.back();
}

void DenseLayout::backward(std::span<const double> params, DenseTrace& trace, std::span<double> output_grad,
                           std::span<double> grad, std::span<double> input_grad) const {
  std::span<double> delta(output_grad.data(), output_grad.size());
  for (std::size_t l = layer_count(); l-- > 0;) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    backpropagate_activation(activations_[l], trace.values[l + 1], delta);
    simd::outer_accumulate(delta, trace.values[l], grad.subspan(weight_offset(l), in * out));
    auto gb = grad.subspan(bias_offset(l), out);
    for (std::size_t j = 0; j < out; ++j) gb[j] += delta[j];
    if (l == 0 && input_grad.empty()) break;
    // dL/d(values[l]) goes into whichever scratch buffer delta does not alias
    auto& next = delta.data() == trace.delta.data() ? trace.previous : trace.delta;
    std::span<double> prev(next.data(), in);
    std::fill(prev.begin(), prev.end(), 0.0);
    simd::gemv_transposed_accumulate(params.subspan(weight_offset(l), in * out), out, in, delta, prev);
    if (l == 0) {
      std::copy(prev.begin(), prev.end(), input_grad.begin());
    } else {
      delta = prev;
    }
  }
}

void DenseLayout::save(io::Writer& out) const {
  out.u64s(sizes_);
  out.u64(activations_.size());
  for (auto a : activations_) out.u8(static_cast<std::uint8_t>(a));
}

DenseLayout DenseLayout::load(io::Reader& in) {
  auto sizes = in.u64s();
  const auto n = in.u64();
  if (n > 1024) throw DataError("model file corrupt: layer count");
  std::vector<Activation> acts;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto tag = in.u8();
    if (tag > static_cast<std::uint8_t>(Activation::linear)) throw DataError("model file corrupt: activation tag");
    acts.push_back(static_cast<Activation>(tag));
  }
  try {
    return DenseLayout(std::move(sizes), std::move(acts));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file corrupt: ") + e.what());
  }
}

DenseNetwork DenseNetwork::classifier(std::size_t inputs, const std::vector<std::size_t>& hidden,
                                      std::size_t classes, std::uint64_t seed) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(classes);
  std::vector<Activation> acts(hidden.size(), Activation::relu);
  acts.push_back(Activation::softmax);
  DenseNetwork net(std::move(sizes), std::move(acts));
  net.initialize(seed);
  return net;
}

void DenseNetwork::initialize(std::uint64_t seed) {
  Rng rng(seed);
  layout_.initialize(params_, rng);
}

std::span<double> DenseNetwork::weights(std::size_t layer) {
  return std::span<double>(params_).subspan(layout_.weight_offset(layer), layout_.bias_offset(layer) - layout_.weight_offset(layer));
}
std::span<const double> DenseNetwork::weights(std::size_t layer) const {
  return std::span<const double>(params_).subspan(layout_.weight_offset(layer), layout_.bias_offset(layer) - layout_.weight_offset(layer));
}
std::span<double> DenseNetwork::bias(std::size_t layer) {
  return std::span<double>(params_).subspan(layout_.bias_offset(layer), layout_.sizes()[layer + 1]);
}
std::span<const double> DenseNetwork::bias(std::size_t layer) const {
  return std::span<const double>(params_).subspan(layout_.bias_offset(layer), layout_.sizes()[layer + 1]);
}

std::vector<double> DenseNetwork::forward(std::span<const double> x) const {
  auto trace = make_workspace();
  return forward(x, trace);
}

PatternStats score_pattern(std::span<const double> s, std::size_t label, Loss loss, DenseTrace& trace) {
  std::fill(trace.target.begin(), trace.target.end(), 0.0);
  trace.target[label] = 1.0;
  PatternStats stats;
  stats.squared_error = squared_error(s, trace.target);
  stats.correct = predict_class(s) == label;
  stats.loss = loss_gradient(loss, s, trace.target, trace.output_grad);
  return stats;
}

PatternStats DenseNetwork::accumulate_gradient(std::span<const double> x, std::size_t label, Loss loss,
                                               std::span<double> grad, Trace& trace, Rng&) const {
  const auto& s = forward(x, trace);
  const auto stats = score_pattern(s, label, loss, trace);
  backward(trace, trace.output_grad, grad);
  return stats;
}

void DenseNetwork::save(io::Writer& out) const {
  layout_.save(out);
  out.f64s(params_);
}

DenseNetwork DenseNetwork::load(io::Reader& in) {
  DenseNetwork net;
  net.layout_ = DenseLayout::load(in);
  auto params = in.f64s();
  if (params.size() != net.layout_.parameter_count()) throw DataError("model file corrupt: parameter count");
  net.params_ = std::move(params);
  return net;
}

double backprop(const DenseNetwork& net, const Matrix& x, const Matrix& targets, Loss loss,
                std::span<double> grad) {
  if (x.rows() != targets.rows() || targets.cols() != net.output_size()) {
    throw std::invalid_argument("backprop: shape mismatch");
  }
  if (grad.size() != net.parameter_count()) throw std::invalid_argument("backprop: gradient size");
  std::fill(grad.begin(), grad.end(), 0.0);
  auto trace = net.make_workspace();
  double total = 0.0;
  for (std::size_t p = 0; p < x.rows(); ++p) {
    const auto& s = net.forward(x.row(p), trace);
    total += loss_gradient(loss, s, targets.row(p), trace.output_grad);
    net.backward(trace, trace.output_grad, grad);
  }
  return total;
}

}  // namespace nids::mlp
