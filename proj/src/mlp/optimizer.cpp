#include "nids/mlp/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nids::mlp {

std::string_view to_string(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "momentum_gd";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "momentum_gd" || name == "sgd") return OptimizerKind::momentum_gd;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(learning_rate)) throw std::invalid_argument("learning rate must lie in (0, 1)");
  if (kind == OptimizerKind::momentum_gd && !open_unit(momentum)) {
    throw std::invalid_argument("momentum must lie in (0, 1)");
  }
  if (kind == OptimizerKind::adam) {
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
      throw std::invalid_argument("Adam decay rates must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
  }
}

void momentum_step(MomentumState& state, std::span<double> w, std::span<const double> g,
                   double learning_rate, double momentum) {
  if (state.previous.size() != w.size()) state.previous.assign(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double dw = -learning_rate * g[i] + momentum * state.previous[i];
    w[i] += dw;
    state.previous[i] = dw;
  }
}

void adam_step(AdamState& state, std::span<double> w, std::span<const double> g,
               const OptimizerConfig& cfg) {
  if (state.m.size() != w.size()) {
    state.m.assign(w.size(), 0.0);
    state.v.assign(w.size(), 0.0);
    state.steps = 0;
  }
  ++state.steps;
  const double t = static_cast<double>(state.steps);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < w.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    w[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

Optimizer::Optimizer(const OptimizerConfig& cfg, std::size_t parameters) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.kind == OptimizerKind::momentum_gd) {
    momentum_.previous.assign(parameters, 0.0);
  } else {
    adam_.m.assign(parameters, 0.0);
    adam_.v.assign(parameters, 0.0);
  }
}

void Optimizer::step(std::span<double> w, std::span<const double> g) {
  if (cfg_.kind == OptimizerKind::momentum_gd) {
    momentum_step(momentum_, w, g, cfg_.learning_rate, cfg_.momentum);
  } else {
    adam_step(adam_, w, g, cfg_);
  }
}

}  // namespace nids::mlp
