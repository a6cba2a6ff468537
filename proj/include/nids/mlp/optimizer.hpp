#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nids::mlp {

enum class OptimizerKind { momentum_gd, adam };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 0.001;
  double momentum = 0.9;  // momentum_gd only
  double beta1 = 0.9;     // adam only
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws std::invalid_argument unless the rates lie in (0, 1) and the
  /// Adam decays in [0, 1).
  void validate() const;
};

struct MomentumState {
  std::vector<double> previous;  // last applied update, per weight
};

/// dw = -lr * g + momentum * dw_prev; w += dw; dw is kept for the next call.
void momentum_step(MomentumState& state, std::span<double> w, std::span<const double> g,
                   double learning_rate, double momentum);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t steps = 0;
};

/// Bias-corrected Adam update.
void adam_step(AdamState& state, std::span<double> w, std::span<const double> g,
               const OptimizerConfig& cfg);

/// Owns whichever state the configured rule needs.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, std::size_t parameters);

  void step(std::span<double> w, std::span<const double> g);

  const OptimizerConfig& config() const noexcept { return cfg_; }
  const MomentumState& momentum_state() const noexcept { return momentum_; }
  const AdamState& adam_state() const noexcept { return adam_; }

 private:
  OptimizerConfig cfg_;
  MomentumState momentum_;
  AdamState adam_;
};

}  // namespace nids::mlp
