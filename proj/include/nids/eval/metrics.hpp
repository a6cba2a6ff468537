#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nids::eval {

/// Rows are the true class, columns the predicted one.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t operator()(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);

  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;
  std::uint64_t true_positives(std::size_t c) const { return (*this)(c, c); }
  std::uint64_t false_positives(std::size_t c) const;
  std::uint64_t false_negatives(std::size_t c) const;
  std::uint64_t true_negatives(std::size_t c) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Throws std::invalid_argument on a length mismatch and DataError on a label
/// outside [0, classes).
ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> truth,
                                 std::size_t classes);

/// trace / total; for two classes this is (TP + TN) / (TP + TN + FP + FN).
/// Throws std::invalid_argument on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  /// One-vs-rest: (TP + TN) / total with this class as the positive one.
  double accuracy = 0.0;
  /// Set when precision or recall was 0/0 and reported as 0.
  bool degenerate = false;

  friend bool operator==(const ClassScore&, const ClassScore&) = default;
};

/// F = 2PR / (P + R), 0 when P + R = 0. Throws std::invalid_argument on an
/// empty matrix or a class outside it.
ClassScore class_score(const ConfusionMatrix& cm, std::size_t c);

struct Metrics {
  double accuracy = 0.0;
  /// Mean of per-class recalls.
  double average_accuracy = 0.0;
  std::vector<ClassScore> per_class;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

Metrics evaluate(const ConfusionMatrix& cm);

/// Element-wise mean over folds; a class is flagged degenerate if any fold was.
Metrics mean_metrics(std::span<const Metrics> folds);

}  // namespace nids::eval
