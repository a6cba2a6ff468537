#include "nids/eval/metrics.hpp"

#include <stdexcept>
#include <string>

#include "nids/common/error.hpp"

namespace nids::eval {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= classes_ || predicted >= classes_) throw std::out_of_range("confusion matrix: class out of range");
  counts_[truth * classes_ + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t sum = 0;
  for (std::size_t c = 0; c < classes_; ++c) sum += (*this)(c, c);
  return sum;
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t t = 0; t < classes_; ++t) {
    if (t != c) sum += (*this)(t, c);
  }
  return sum;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t p = 0; p < classes_; ++p) {
    if (p != c) sum += (*this)(c, p);
  }
  return sum;
}

std::uint64_t ConfusionMatrix::true_negatives(std::size_t c) const {
  return total() - true_positives(c) - false_positives(c) - false_negatives(c);
}

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> truth,
                                 std::size_t classes) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("confusion matrix: " + std::to_string(predicted.size()) + " predictions for " +
                                std::to_string(truth.size()) + " labels");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (int label : {truth[i], predicted[i]}) {
      if (label < 0 || static_cast<std::size_t>(label) >= classes) {
        throw DataError("confusion matrix: label " + std::to_string(label) + " outside the " +
                        std::to_string(classes) + "-class vocabulary");
      }
    }
    cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

ClassScore class_score(const ConfusionMatrix& cm, std::size_t c) {
  if (c >= cm.classes()) throw std::invalid_argument("class_score: class out of range");
  const auto total = cm.total();
  if (total == 0) throw std::invalid_argument("class_score: empty confusion matrix");
  const double tp = static_cast<double>(cm.true_positives(c));
  const double fp = static_cast<double>(cm.false_positives(c));
  const double fn = static_cast<double>(cm.false_negatives(c));
  const double tn = static_cast<double>(cm.true_negatives(c));

  ClassScore s;
  if (tp + fp > 0) {
    s.precision = tp / (tp + fp);
  } else {
    s.degenerate = true;
  }
  if (tp + fn > 0) {
    s.recall = tp / (tp + fn);
  } else {
    s.degenerate = true;
  }
  if (s.precision + s.recall > 0) s.f_measure = 2 * s.precision * s.recall / (s.precision + s.recall);
  s.accuracy = (tp + tn) / static_cast<double>(total);
  return s;
}

Metrics evaluate(const ConfusionMatrix& cm) {
  Metrics m;
  m.accuracy = accuracy(cm);
  double recall_sum = 0.0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    m.per_class.push_back(class_score(cm, c));
    recall_sum += m.per_class.back().recall;
  }
  m.average_accuracy = recall_sum / static_cast<double>(cm.classes());
  return m;
}

Metrics mean_metrics(std::span<const Metrics> folds) {
  if (folds.empty()) throw std::invalid_argument("mean_metrics: no folds");
  const auto classes = folds.front().per_class.size();
  Metrics out;
  out.per_class.resize(classes);
  for (const auto& f : folds) {
    if (f.per_class.size() != classes) throw std::invalid_argument("mean_metrics: class count differs between folds");
    out.accuracy += f.accuracy;
    out.average_accuracy += f.average_accuracy;
    for (std::size_t c = 0; c < classes; ++c) {
      auto& o = out.per_class[c];
      const auto& s = f.per_class[c];
      o.precision += s.precision;
      o.recall += s.recall;
      o.f_measure += s.f_measure;
      o.accuracy += s.accuracy;
      o.degenerate = o.degenerate || s.degenerate;
    }
  }
  const double n = static_cast<double>(folds.size());
  out.accuracy /= n;
  out.average_accuracy /= n;
  for (auto& o : out.per_class) {
    o.precision /= n;
    o.recall /= n;
    o.f_measure /= n;
    o.accuracy /= n;
  }
  return out;
}

}  // namespace nids::eval
