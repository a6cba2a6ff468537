#include "nids/deep/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nids/common/error.hpp"
#include "nids/simd/kernels.hpp"

namespace nids::deep {

std::string_view to_string(DeepKind k) {
  switch (k) {
    case DeepKind::cnn: return "cnn";
    case DeepKind::rnn: return "rnn";
    case DeepKind::lstm: return "lstm";
    case DeepKind::gru: return "gru";
  }
  return "?";
}

DeepKind parse_deep_kind(std::string_view name) {
  for (auto k : {DeepKind::cnn, DeepKind::rnn, DeepKind::lstm, DeepKind::gru}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown deep model '" + std::string(name) + "'");
}

RecurrentSpec DeepArchitecture::cell() const {
  RecurrentSpec s;
  s.kind = kind == DeepKind::lstm ? CellKind::lstm : kind == DeepKind::gru ? CellKind::gru : CellKind::rnn;
  s.units = units;
  s.inputs = timesteps == 0 ? 0 : inputs / timesteps;
  return s;
}

void DeepArchitecture::validate() const {
  if (inputs == 0 || classes < 2) throw std::invalid_argument("deep model: need inputs and >= 2 classes");
  if (kind == DeepKind::cnn) {
    if (conv.filters == 0 || conv.kernel == 0 || inputs < conv.kernel) {
      throw std::invalid_argument("deep model: kernel does not fit the input");
    }
    if (pool == 0 || conv.output_length(inputs) < pool) throw std::invalid_argument("deep model: pooling too wide");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("deep model: dropout rate must lie in [0, 1)");
  } else {
    if (units == 0) throw std::invalid_argument("deep model: recurrent units must be positive");
    if (timesteps == 0 || inputs % timesteps != 0) {
      throw std::invalid_argument("deep model: inputs must split evenly into timesteps");
    }
  }
  for (auto h : head_hidden) {
    if (h == 0) throw std::invalid_argument("deep model: empty dense layer");
  }
}

std::size_t DeepArchitecture::front_outputs() const {
  if (kind == DeepKind::cnn) return conv.filters * (conv.output_length(inputs) / pool);
  return units;
}

std::size_t DeepArchitecture::front_parameter_count() const {
  return kind == DeepKind::cnn ? conv.parameter_count() : cell().parameter_count();
}

std::size_t DeepArchitecture::parameter_count() const {
  std::vector<std::size_t> sizes{front_outputs()};
  sizes.insert(sizes.end(), head_hidden.begin(), head_hidden.end());
  sizes.push_back(classes);
  return front_parameter_count() + mlp::weight_count(sizes);
}

DeepArchitecture reference_architecture(DeepKind kind, std::size_t inputs, std::size_t classes) {
  DeepArchitecture a;
  a.kind = kind;
  a.inputs = inputs;
  a.classes = classes;
  switch (kind) {
    case DeepKind::cnn:
      a.conv = ConvSpec{7, 4};
      a.pool = 2;
      a.dropout = 0.3;
      a.head_hidden = {8};
      break;
    case DeepKind::rnn:
      a.units = 18;
      a.head_hidden = {10};
      break;
    case DeepKind::lstm:
      a.units = 6;
      a.head_hidden = {8};
      break;
    case DeepKind::gru:
      a.units = 8;
      a.head_hidden = {10};
      break;
  }
  return a;
}

void check_weight_budget(const DeepArchitecture& arch) {
  const auto n = arch.parameter_count();
  if (n < kMinWeightBudget || n > kMaxWeightBudget) {
    throw std::invalid_argument(std::string(to_string(arch.kind)) + " has " + std::to_string(n) +
                                " weights, outside the budget [" + std::to_string(kMinWeightBudget) + ", " +
                                std::to_string(kMaxWeightBudget) + "]");
  }
}

DeepModel::DeepModel(DeepArchitecture arch, std::uint64_t seed) : arch_(std::move(arch)) {
  build();
  Rng rng(seed);
  auto front = front_parameters();
  if (arch_.kind == DeepKind::cnn) {
    const auto& c = arch_.conv;
    const double limit = std::sqrt(6.0 / static_cast<double>(c.kernel + c.filters * c.kernel));
    for (std::size_t i = 0; i < c.filters * c.kernel; ++i) front[i] = rng.uniform(-limit, limit);
  } else {
    initialize_cell(arch_.cell(), front, rng);
  }
  head_.initialize(head_parameters(), rng);
}

void DeepModel::build() {
  arch_.validate();
  std::vector<std::size_t> sizes{arch_.front_outputs()};
  sizes.insert(sizes.end(), arch_.head_hidden.begin(), arch_.head_hidden.end());
  sizes.push_back(arch_.classes);
  std::vector<mlp::Activation> acts(arch_.head_hidden.size(), mlp::Activation::relu);
  acts.push_back(mlp::Activation::softmax);
  head_ = mlp::DenseLayout(std::move(sizes), std::move(acts));
  head_offset_ = arch_.front_parameter_count();
  params_.assign(head_offset_ + head_.parameter_count(), 0.0);
}

DeepModel::Workspace DeepModel::make_workspace() const {
  Workspace ws;
  ws.features.resize(arch_.front_outputs());
  ws.front_grad.resize(arch_.front_outputs());
  ws.head = head_.make_trace();
  return ws;
}

const std::vector<double>& DeepModel::forward(std::span<const double> x, Workspace& ws, bool training,
                                              Rng& rng) const {
  if (x.size() != arch_.inputs) {
    throw std::invalid_argument("deep model: input has " + std::to_string(x.size()) + " values, expected " +
                                std::to_string(arch_.inputs));
  }
  const std::span<const double> p(params_);
  if (arch_.kind == DeepKind::cnn) {
    const auto& c = arch_.conv;
    ws.input.assign(x.begin(), x.end());
    ws.conv = conv1d_forward(c, p.first(c.filters * c.kernel), p.subspan(c.filters * c.kernel, c.filters), x);
    for (auto& v : ws.conv.values()) v = v > 0.0 ? v : 0.0;
    const std::size_t pooled = ws.conv.cols() / arch_.pool;
    ws.features.resize(c.filters * pooled);
    ws.winners.resize(c.filters * pooled);
    std::vector<std::size_t> w;
    for (std::size_t f = 0; f < c.filters; ++f) {
      const auto out = maxpool1d(ws.conv.row(f), arch_.pool, &w);
      std::copy(out.begin(), out.end(), ws.features.begin() + static_cast<std::ptrdiff_t>(f * pooled));
      std::copy(w.begin(), w.end(), ws.winners.begin() + static_cast<std::ptrdiff_t>(f * pooled));
    }
    dropout_apply(ws.features, arch_.dropout, rng, training, &ws.mask);
  } else {
    const auto h = ws.sequence.forward(arch_.cell(), p.first(head_offset_), x, arch_.timesteps);
    ws.features.assign(h.begin(), h.end());
  }
  return head_.forward(p.subspan(head_offset_), ws.features, ws.head);
}

void DeepModel::backward(Workspace& ws, std::span<double> output_grad, std::span<double> grad) const {
  const std::span<const double> p(params_);
  head_.backward(p.subspan(head_offset_), ws.head, output_grad, grad.subspan(head_offset_), ws.front_grad);
  if (arch_.kind == DeepKind::cnn) {
    const auto& c = arch_.conv;
    const std::size_t len = ws.conv.cols();
    const std::size_t pooled = len / arch_.pool;
    ws.conv_grad.assign(c.filters * len, 0.0);
    for (std::size_t f = 0; f < c.filters; ++f) {
      for (std::size_t q = 0; q < pooled; ++q) {
        const auto i = f * pooled + q;
        const auto pos = ws.winners[i];
        if (ws.conv(f, pos) > 0.0) ws.conv_grad[f * len + pos] += ws.front_grad[i] * ws.mask[i];
      }
    }
    auto gw = grad.first(c.filters * c.kernel);
    auto gb = grad.subspan(c.filters * c.kernel, c.filters);
    const auto& k = simd::active();
    for (std::size_t f = 0; f < c.filters; ++f) {
      for (std::size_t pos = 0; pos < len; ++pos) {
        const double d = ws.conv_grad[f * len + pos];
        if (d == 0.0) continue;
        gb[f] += d;
        k.axpy(d, ws.input.data() + pos, gw.data() + f * c.kernel, c.kernel);
      }
    }
  } else {
    ws.sequence.backward(arch_.cell(), p.first(head_offset_), ws.front_grad, grad);
  }
}

mlp::PatternStats DeepModel::accumulate_gradient(std::span<const double> x, std::size_t label, mlp::Loss loss,
                                                 std::span<double> grad, Workspace& ws, Rng& rng) const {
  const auto& s = forward(x, ws, true, rng);
  const auto stats = mlp::score_pattern(s, label, loss, ws.head);
  backward(ws, ws.head.output_grad, grad);
  return stats;
}

std::span<const double> DeepModel::scores(std::span<const double> x, Workspace& ws) const {
  Rng unused(0);
  return forward(x, ws, false, unused);
}

void DeepModel::save(io::Writer& out) const {
  out.u8(static_cast<std::uint8_t>(arch_.kind));
  out.u64(arch_.inputs);
  out.u64(arch_.classes);
  out.u64(arch_.conv.filters);
  out.u64(arch_.conv.kernel);
  out.u64(arch_.pool);
  out.f64(arch_.dropout);
  out.u64(arch_.units);
  out.u64(arch_.timesteps);
  out.u64s(arch_.head_hidden);
  out.f64s(params_);
}

DeepModel DeepModel::load(io::Reader& in) {
  DeepModel m;
  const auto kind = in.u8();
  if (kind > static_cast<std::uint8_t>(DeepKind::gru)) throw DataError("model file corrupt: deep kind");
  m.arch_.kind = static_cast<DeepKind>(kind);
  m.arch_.inputs = in.u64();
  m.arch_.classes = in.u64();
  m.arch_.conv.filters = in.u64();
  m.arch_.conv.kernel = in.u64();
  m.arch_.pool = in.u64();
  m.arch_.dropout = in.f64();
  m.arch_.units = in.u64();
  m.arch_.timesteps = in.u64();
  m.arch_.head_hidden = in.u64s();
  try {
    m.build();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file corrupt: ") + e.what());
  }
  auto params = in.f64s();
  if (params.size() != m.params_.size()) throw DataError("model file corrupt: parameter count");
  m.params_ = std::move(params);
  return m;
}

mlp::EpochHistory train_deep(DeepModel& model, const Matrix& x, std::span<const int> y,
                             const mlp::TrainConfig& cfg, bool enforce_budget) {
  if (enforce_budget) check_weight_budget(model.architecture());
  return mlp::train_model(model, x, y, cfg);
}

}  // namespace nids::deep
