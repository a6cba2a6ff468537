#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/dataset/flow_dataset.hpp"

namespace nids::dataset {

struct LabeledData {
  Matrix x;
  std::vector<int> y;
};

/// Isotropic Gaussian clusters, `n` points split as evenly as possible over
/// `classes`. Class c is centred at c * separation on every axis.
LabeledData gaussian_blobs(std::size_t n, std::size_t dim, std::size_t classes, double separation,
                           double stddev, std::uint64_t seed);

/// Flow-shaped synthetic records over the 78-feature schema. Each class gets
/// its own log-normal profile per feature; `overlap` in [0, 1] pulls the
/// attack profiles toward the benign one. Used for the bundled sample file
/// and for timing runs that do not need real captures.
FlowDataset synthetic_flows(const std::vector<std::string>& class_names,
                            const std::vector<std::size_t>& counts, double overlap,
                            std::uint64_t seed);

}  // namespace nids::dataset
