#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/dataset/flow_dataset.hpp"
#include "nids/eval/classifier.hpp"
#include "nids/eval/metrics.hpp"

namespace nids::eval {

/// Unscaled inputs with dense labels and their names.
struct Problem {
  Matrix x;
  std::vector<int> y;
  std::vector<std::string> classes;
};

Problem make_problem(const dataset::FlowDataset& ds, const dataset::FeatureSelection& sel = {});

struct FoldResult {
  ConfusionMatrix confusion;
  Metrics metrics;
  std::vector<double> mse_history;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  /// Rows the fold's scaler was fitted on; equals train_rows when nothing leaked.
  std::size_t scaler_rows = 0;
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  Metrics mean;
  /// Epoch-wise mean of the fold histories (empty if the learner has none).
  std::vector<double> mse_history;

  bool leak_free() const;
};

/// Stratified k-fold: per fold a fresh learner from `factory`, a min-max
/// scaler fitted on the training split only, and the test split evaluated.
CrossValidation cross_validate(const ClassifierFactory& factory, const Problem& problem, std::size_t k,
                               std::uint64_t seed);

struct TimingRecord {
  std::string algorithm;
  std::size_t size = 0;
  double seconds = 0.0;
  /// Accuracy on the classified subsample, for the size-sweep plots.
  double average_accuracy = 0.0;
};

inline const std::vector<std::size_t> kDefaultSweep{1000, 2000, 5000, 10000, 20000};

/// For each size: class-balanced subsample, then scale, train and classify
/// the whole subsample under one wall clock. Serial. Throws DataError when a
/// size exceeds the problem.
std::vector<TimingRecord> benchmark_time(const ClassifierFactory& factory, const Problem& problem,
                                         const std::vector<std::size_t>& sizes, std::uint64_t seed);

/// Class-balanced seeded subsample: classes are shuffled and dealt in turn
/// until `n` indices are drawn; returned in ascending order.
std::vector<std::size_t> balanced_subsample(std::span<const int> y, std::size_t n, std::uint64_t seed);

}  // namespace nids::eval
