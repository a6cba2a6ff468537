#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nids/dataset/flow_dataset.hpp"

namespace nids::dataset {

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // record index -> fold index
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Stratified k-fold split: each class is shuffled with the seed and dealt
/// round-robin, continuing the deal across classes, so per-class counts and
/// total fold sizes both differ by at most one. Throws DataError for k < 2 or
/// a populated class with fewer than k records.
FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);
FoldPlan stratified_kfold(const FlowDataset& ds, std::size_t k, std::uint64_t seed);

}  // namespace nids::dataset
