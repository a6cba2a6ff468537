#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nids/common/matrix.hpp"

namespace nids::eval {

/// What the evaluation harness needs from a learner. Inputs arrive already
/// scaled to [0, 1]; labels are dense indices below `classes`.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string name() const = 0;
  virtual void fit(const Matrix& x, std::span<const int> y, std::size_t classes) = 0;
  virtual std::vector<int> predict(const Matrix& x) const = 0;
  /// Per-epoch training MSE, empty for learners that do not track one.
  virtual std::vector<double> mse_history() const { return {}; }
};

/// Builds a fresh, untrained learner. Called once per fold or sweep size so
/// no state carries between runs; `seed` is the run's derived seed.
using ClassifierFactory = std::function<std::unique_ptr<Classifier>(std::uint64_t seed)>;

}  // namespace nids::eval
