#pragma once

#include <cstddef>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/dataset/flow_dataset.hpp"

namespace nids::dataset {

/// Per-feature min-max map onto [0, 1]. Bounds come from the fitting split
/// only; `apply` never looks at the data it transforms, and clamps values
/// outside the fitted range. Constant features map to 0.
class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  MinMaxScaler(std::vector<double> minimum, std::vector<double> maximum);

  /// Throws DataError on an empty matrix. Constant columns are logged.
  static MinMaxScaler fit(const Matrix& train);

  Matrix apply(const Matrix& x) const;
  void apply_inplace(std::span<double> row) const;

  std::size_t width() const noexcept { return min_.size(); }
  const std::vector<double>& minimum() const noexcept { return min_; }
  const std::vector<double>& maximum() const noexcept { return max_; }
  /// Number of rows the bounds were fitted on (leakage instrumentation).
  std::size_t fitted_rows() const noexcept { return fitted_rows_; }
  const std::vector<std::size_t>& constant_features() const noexcept { return constant_; }

  friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;

 private:
  std::vector<double> min_;
  std::vector<double> max_;
  std::vector<std::size_t> constant_;
  std::size_t fitted_rows_ = 0;
};

/// Dataset-level wrappers over all schema features.
MinMaxScaler fit_scaler(const FlowDataset& train);
FlowDataset apply_scaler(const MinMaxScaler& scaler, const FlowDataset& ds);

}  // namespace nids::dataset
