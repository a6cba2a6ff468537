#include "nids/eval/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "nids/common/error.hpp"
#include "nids/common/log.hpp"
#include "nids/common/rng.hpp"
#include "nids/dataset/folds.hpp"
#include "nids/dataset/scaler.hpp"
#include "nids/eval/stats.hpp"

namespace nids::eval {

Problem make_problem(const dataset::FlowDataset& ds, const dataset::FeatureSelection& sel) {
  Problem p;
  p.x = dataset::design_matrix(ds, dataset::input_columns(ds.schema, sel));
  p.y = dataset::label_vector(ds);
  p.classes = ds.label_vocab;
  return p;
}

bool CrossValidation::leak_free() const {
  return std::all_of(folds.begin(), folds.end(), [](const FoldResult& f) { return f.scaler_rows == f.train_rows; });
}

namespace {

std::vector<int> pick(std::span<const int> y, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(y[i]);
  return out;
}

}  // namespace

CrossValidation cross_validate(const ClassifierFactory& factory, const Problem& problem, std::size_t k,
                               std::uint64_t seed) {
  if (problem.x.rows() != problem.y.size()) throw DataError("cross_validate: one label per row required");
  const auto plan = dataset::stratified_kfold(problem.y, k, seed);
  const auto classes = problem.classes.size();

  CrossValidation cv;
  std::vector<Metrics> per_fold;
  std::vector<std::vector<double>> histories;
  for (std::size_t fold = 0; fold < k; ++fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    const auto scaler = dataset::MinMaxScaler::fit(problem.x.select_rows(train_idx));
    const auto x_train = scaler.apply(problem.x.select_rows(train_idx));
    const auto x_test = scaler.apply(problem.x.select_rows(test_idx));
    const auto y_train = pick(problem.y, train_idx);
    const auto y_test = pick(problem.y, test_idx);

    auto model = factory(mix_seed(seed, 100 + fold));
    model->fit(x_train, y_train, classes);
    const auto predicted = model->predict(x_test);

    FoldResult r;
    r.confusion = confusion_matrix(predicted, y_test, classes);
    r.metrics = evaluate(r.confusion);
    r.mse_history = model->mse_history();
    r.train_rows = train_idx.size();
    r.test_rows = test_idx.size();
    r.scaler_rows = scaler.fitted_rows();
    log::info(model->name() + " fold " + std::to_string(fold + 1) + "/" + std::to_string(k) +
              ": accuracy " + std::to_string(r.metrics.accuracy));
    per_fold.push_back(r.metrics);
    if (!r.mse_history.empty()) histories.push_back(r.mse_history);
    cv.folds.push_back(std::move(r));
  }
  cv.mean = mean_metrics(per_fold);
  cv.mse_history = mean_history(histories);
  return cv;
}

std::vector<std::size_t> balanced_subsample(std::span<const int> y, std::size_t n, std::uint64_t seed) {
  if (n > y.size()) {
    throw DataError("subsample of " + std::to_string(n) + " requested from " + std::to_string(y.size()) + " records");
  }
  int max_label = -1;
  for (int l : y) max_label = std::max(max_label, l);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_label + 1));
  for (std::size_t i = 0; i < y.size(); ++i) members[static_cast<std::size_t>(y[i])].push_back(i);
  Rng rng(seed);
  for (auto& m : members) rng.shuffle(std::span<std::size_t>(m));

  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t round = 0; out.size() < n; ++round) {
    for (const auto& m : members) {
      if (round < m.size() && out.size() < n) out.push_back(m[round]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TimingRecord> benchmark_time(const ClassifierFactory& factory, const Problem& problem,
                                         const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  for (auto n : sizes) {
    if (n > problem.x.rows()) {
      throw DataError("size sweep: " + std::to_string(n) + " exceeds the " + std::to_string(problem.x.rows()) +
                      "-record dataset");
    }
  }
  std::vector<TimingRecord> out;
  for (auto n : sizes) {
    const auto idx = balanced_subsample(problem.y, n, mix_seed(seed, n));
    const auto raw = problem.x.select_rows(idx);
    const auto y = pick(problem.y, idx);
    auto model = factory(mix_seed(seed, 200 + n));

    const auto start = std::chrono::steady_clock::now();
    const auto x = dataset::MinMaxScaler::fit(raw).apply(raw);
    model->fit(x, y, problem.classes.size());
    const auto predicted = model->predict(x);
    const auto stop = std::chrono::steady_clock::now();

    TimingRecord t;
    t.algorithm = model->name();
    t.size = n;
    t.seconds = std::max(std::chrono::duration<double>(stop - start).count(), 1e-9);
    t.average_accuracy = evaluate(confusion_matrix(predicted, y, problem.classes.size())).average_accuracy;
    log::info(t.algorithm + " n=" + std::to_string(n) + ": " + std::to_string(t.seconds) + " s");
    out.push_back(t);
  }
  return out;
}

}  // namespace nids::eval
