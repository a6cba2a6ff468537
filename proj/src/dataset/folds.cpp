#include "nids/dataset/folds.hpp"

#include <algorithm>
#include <string>

#include "nids/common/error.hpp"
#include "nids/common/rng.hpp"

namespace nids::dataset {

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold needs k >= 2 (k=" + std::to_string(k) + ")");
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw DataError("k-fold: negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_label + 1));
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(labels.size(), 0);
  Rng rng(seed);
  std::size_t deal = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& m = members[c];
    if (m.empty()) continue;
    if (m.size() < k) {
      throw DataError("k-fold: class " + std::to_string(c) + " has " + std::to_string(m.size()) +
                      " records, fewer than k=" + std::to_string(k));
    }
    rng.shuffle(std::span<std::size_t>(m));
    for (auto idx : m) plan.assignment[idx] = deal++ % k;
  }
  return plan;
}

FoldPlan stratified_kfold(const FlowDataset& ds, std::size_t k, std::uint64_t seed) {
  const auto y = label_vector(ds);
  return stratified_kfold(std::span<const int>(y), k, seed);
}

}  // namespace nids::dataset
