#pragma once

// Mini-batch training loop shared by the dense and the deep models. A model
// plugs in by exposing its flat parameter vector and a per-pattern gradient.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nids/common/error.hpp"
#include "nids/common/matrix.hpp"
#include "nids/common/rng.hpp"
#include "nids/mlp/loss.hpp"
#include "nids/mlp/network.hpp"
#include "nids/mlp/optimizer.hpp"

namespace nids::mlp {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 100;
  OptimizerConfig optimizer;
  Loss loss = Loss::least_squares;
  std::uint64_t seed = 1;
  /// Called after every epoch with (epoch index, mean squared error).
  std::function<void(std::size_t, double)> on_epoch;
};

/// One entry per completed epoch. `mse` is the mean over the epoch's
/// patterns of ||t - s||^2, accumulated as the epoch runs.
struct EpochHistory {
  std::vector<double> mse;
  std::vector<double> accuracy;

  std::size_t size() const noexcept { return mse.size(); }
};

template <typename M>
concept TrainableModel = requires(M& m, const M& cm, std::span<const double> x, std::size_t label,
                                  Loss loss, std::span<double> g, typename M::Workspace& ws, Rng& rng) {
  { m.parameters() } -> std::same_as<std::span<double>>;
  { cm.class_count() } -> std::convertible_to<std::size_t>;
  { cm.make_workspace() } -> std::same_as<typename M::Workspace>;
  { cm.accumulate_gradient(x, label, loss, g, ws, rng) } -> std::same_as<PatternStats>;
  { cm.scores(x, ws) } -> std::convertible_to<std::span<const double>>;
};

/// Shuffled mini-batches, gradient averaged over the batch, one optimizer
/// step per batch. Deterministic in (model, data, cfg). Throws
/// TrainingError if the loss turns non-finite, std::invalid_argument on
/// shape or label problems.
template <TrainableModel M>
EpochHistory train_model(M& model, const Matrix& x, std::span<const int> y, const TrainConfig& cfg) {
  if (x.rows() != y.size()) throw std::invalid_argument("train: one label per row required");
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch size must be positive");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= model.class_count()) {
      throw std::invalid_argument("train: label " + std::to_string(label) + " outside the output layer");
    }
  }
  EpochHistory history;
  if (cfg.epochs == 0 || x.rows() == 0) return history;

  Optimizer optimizer(cfg.optimizer, model.parameters().size());
  Rng order_rng(mix_seed(cfg.seed, 0x5EED0001));
  Rng model_rng(mix_seed(cfg.seed, 0x5EED0002));
  auto ws = model.make_workspace();
  std::vector<double> grad(model.parameters().size());
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double squared = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const auto idx = order[i];
        const auto stats = model.accumulate_gradient(x.row(idx), static_cast<std::size_t>(y[idx]),
                                                     cfg.loss, grad, ws, model_rng);
        squared += stats.squared_error;
        batch_loss += stats.loss;
        correct += stats.correct ? 1 : 0;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch + 1) +
                            ", batch starting at pattern " + std::to_string(start));
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& g : grad) g *= scale;
      optimizer.step(model.parameters(), grad);
    }
    const double n = static_cast<double>(x.rows());
    history.mse.push_back(squared / n);
    history.accuracy.push_back(static_cast<double>(correct) / n);
    if (cfg.on_epoch) cfg.on_epoch(epoch, history.mse.back());
  }
  return history;
}

/// Argmax class per row.
template <TrainableModel M>
std::vector<int> predict_classes(const M& model, const Matrix& x) {
  auto ws = model.make_workspace();
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out[r] = static_cast<int>(predict_class(model.scores(x.row(r), ws)));
  }
  return out;
}

/// Dense-network convenience wrapper.
inline EpochHistory train(DenseNetwork& net, const Matrix& x, std::span<const int> y, const TrainConfig& cfg) {
  return train_model(net, x, y, cfg);
}

}  // namespace nids::mlp
