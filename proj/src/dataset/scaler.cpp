#include "nids/dataset/scaler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nids/common/error.hpp"
#include "nids/common/log.hpp"

namespace nids::dataset {

MinMaxScaler::MinMaxScaler(std::vector<double> minimum, std::vector<double> maximum)
    : min_(std::move(minimum)), max_(std::move(maximum)) {
  if (min_.size() != max_.size()) throw std::invalid_argument("MinMaxScaler: bound sizes differ");
  for (std::size_t f = 0; f < min_.size(); ++f) {
    if (max_[f] < min_[f]) throw std::invalid_argument("MinMaxScaler: max below min");
    if (max_[f] == min_[f]) constant_.push_back(f);
  }
}

MinMaxScaler MinMaxScaler::fit(const Matrix& train) {
  if (train.empty()) throw DataError("cannot fit a scaler on an empty split");
  std::vector<double> lo(train.row(0).begin(), train.row(0).end());
  std::vector<double> hi = lo;
  for (std::size_t r = 1; r < train.rows(); ++r) {
    const auto row = train.row(r);
    for (std::size_t f = 0; f < row.size(); ++f) {
      lo[f] = std::min(lo[f], row[f]);
      hi[f] = std::max(hi[f], row[f]);
    }
  }
  MinMaxScaler s(std::move(lo), std::move(hi));
  s.fitted_rows_ = train.rows();
  if (!s.constant_.empty()) {
    log::warn("scaler: " + std::to_string(s.constant_.size()) +
              " constant feature(s) on the fitting split map to 0");
  }
  return s;
}

void MinMaxScaler::apply_inplace(std::span<double> row) const {
  if (row.size() != min_.size()) throw std::invalid_argument("MinMaxScaler: width mismatch");
  for (std::size_t f = 0; f < row.size(); ++f) {
    const double range = max_[f] - min_[f];
    if (range <= 0.0) {
      row[f] = 0.0;
      continue;
    }
    row[f] = std::clamp((row[f] - min_[f]) / range, 0.0, 1.0);
  }
}

Matrix MinMaxScaler::apply(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) apply_inplace(out.row(r));
  return out;
}

MinMaxScaler fit_scaler(const FlowDataset& train) {
  std::vector<std::size_t> all(train.schema.size());
  for (std::size_t f = 0; f < all.size(); ++f) all[f] = f;
  return MinMaxScaler::fit(design_matrix(train, all));
}

FlowDataset apply_scaler(const MinMaxScaler& scaler, const FlowDataset& ds) {
  FlowDataset out = ds;
  for (auto& rec : out.records) scaler.apply_inplace(rec.features);
  return out;
}

}  // namespace nids::dataset
