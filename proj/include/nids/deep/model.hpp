#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/common/rng.hpp"
#include "nids/deep/layers.hpp"
#include "nids/deep/recurrent.hpp"
#include "nids/io/binary.hpp"
#include "nids/mlp/network.hpp"
#include "nids/mlp/trainer.hpp"

namespace nids::deep {

enum class DeepKind { cnn, rnn, lstm, gru };

std::string_view to_string(DeepKind k);
DeepKind parse_deep_kind(std::string_view name);

/// A feature front-end (convolution + pooling + dropout, or one recurrent
/// cell) followed by a dense head with ReLU hidden layers and a softmax.
struct DeepArchitecture {
  DeepKind kind = DeepKind::cnn;
  std::size_t inputs = 76;
  std::size_t classes = 2;
  ConvSpec conv;
  std::size_t pool = 2;
  double dropout = 0.3;
  std::size_t units = 18;
  /// Recurrent models read the input as `timesteps` consecutive slices of
  /// inputs / timesteps features each.
  std::size_t timesteps = 1;
  std::vector<std::size_t> head_hidden{8};

  /// Throws std::invalid_argument on inconsistent sizes.
  void validate() const;
  std::size_t front_outputs() const;
  std::size_t front_parameter_count() const;
  std::size_t parameter_count() const;
  RecurrentSpec cell() const;

  friend bool operator==(const DeepArchitecture&, const DeepArchitecture&) = default;
};

/// The structures used for the comparison: CNN with 7 filters of width 4,
/// max pooling 2, dropout 0.3 and an 8-neuron dense layer; RNN with 18
/// units, LSTM with 6 and GRU with 8, each followed by a small dense layer
/// sized to keep the total near two thousand weights.
DeepArchitecture reference_architecture(DeepKind kind, std::size_t inputs, std::size_t classes);

inline constexpr std::size_t kMinWeightBudget = 1500;
inline constexpr std::size_t kMaxWeightBudget = 3000;

/// Throws std::invalid_argument when the parameter count falls outside
/// [kMinWeightBudget, kMaxWeightBudget].
void check_weight_budget(const DeepArchitecture& arch);

class DeepModel {
 public:
  struct Workspace {
    std::vector<double> input;
    Matrix conv;
    std::vector<double> features;
    std::vector<std::size_t> winners;
    std::vector<double> mask;
    SequenceTrace sequence;
    mlp::DenseTrace head;
    std::vector<double> front_grad;
    std::vector<double> conv_grad;
  };

  DeepModel() = default;
  DeepModel(DeepArchitecture arch, std::uint64_t seed);

  const DeepArchitecture& architecture() const noexcept { return arch_; }
  const mlp::DenseLayout& head() const noexcept { return head_; }
  std::size_t class_count() const noexcept { return arch_.classes; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> front_parameters() noexcept { return std::span<double>(params_).first(head_offset_); }
  std::span<double> head_parameters() noexcept { return std::span<double>(params_).subspan(head_offset_); }

  Workspace make_workspace() const;

  /// Class probabilities. Dropout is active only when `training` is set.
  const std::vector<double>& forward(std::span<const double> x, Workspace& ws, bool training, Rng& rng) const;

  /// Reverse pass after a forward in `ws`; `output_grad` is dL/ds.
  void backward(Workspace& ws, std::span<double> output_grad, std::span<double> grad) const;

  mlp::PatternStats accumulate_gradient(std::span<const double> x, std::size_t label, mlp::Loss loss,
                                        std::span<double> grad, Workspace& ws, Rng& rng) const;

  /// Inference-mode scores.
  std::span<const double> scores(std::span<const double> x, Workspace& ws) const;

  void save(io::Writer& out) const;
  static DeepModel load(io::Reader& in);

  friend bool operator==(const DeepModel&, const DeepModel&) = default;

 private:
  void build();

  DeepArchitecture arch_;
  mlp::DenseLayout head_;
  std::size_t head_offset_ = 0;
  std::vector<double> params_;
};

/// Trains with the shared mini-batch loop. The weight budget is checked
/// first unless `enforce_budget` is false (small models in tests).
mlp::EpochHistory train_deep(DeepModel& model, const Matrix& x, std::span<const int> y,
                             const mlp::TrainConfig& cfg, bool enforce_budget = true);

}  // namespace nids::deep
