#include "nids/dataset/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "nids/common/rng.hpp"

namespace nids::dataset {

LabeledData gaussian_blobs(std::size_t n, std::size_t dim, std::size_t classes, double separation,
                           double stddev, std::uint64_t seed) {
  if (classes == 0 || dim == 0) throw std::invalid_argument("gaussian_blobs: empty shape");
  Rng rng(seed);
  LabeledData out{Matrix(n, dim), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = i % classes;
    out.y[i] = static_cast<int>(c);
    for (std::size_t d = 0; d < dim; ++d) {
      out.x(i, d) = static_cast<double>(c) * separation + rng.normal(0.0, stddev);
    }
  }
  return out;
}

FlowDataset synthetic_flows(const std::vector<std::string>& class_names,
                            const std::vector<std::size_t>& counts, double overlap,
                            std::uint64_t seed) {
  if (class_names.size() != counts.size() || class_names.empty()) {
    throw std::invalid_argument("synthetic_flows: one count per class required");
  }
  const auto& schema = flow_schema();
  const std::size_t features = schema.size();
  Rng profile_rng(mix_seed(seed, 1));

  // log-space location and spread per (class, feature); class 0 is the reference profile
  std::vector<std::vector<double>> location(class_names.size(), std::vector<double>(features));
  std::vector<std::vector<double>> spread(class_names.size(), std::vector<double>(features));
  std::vector<double> base(features);
  for (std::size_t f = 0; f < features; ++f) base[f] = profile_rng.uniform(0.0, 9.0);
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    for (std::size_t f = 0; f < features; ++f) {
      const double shift = c == 0 ? 0.0 : (1.0 - overlap) * profile_rng.normal(0.0, 2.0);
      location[c][f] = base[f] + shift;
      spread[c][f] = profile_rng.uniform(0.2, 0.8);
    }
  }

  FlowDataset ds;
  ds.schema = schema;
  ds.label_vocab = class_names;
  ds.source = "synthetic";
  Rng rng(mix_seed(seed, 2));
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      FlowRecord rec;
      rec.label = static_cast<std::uint32_t>(c);
      rec.features.resize(features);
      for (std::size_t f = 0; f < features; ++f) {
        double v = std::exp(rng.normal(location[c][f], spread[c][f])) - 1.0;
        if (v < 0.0) v = 0.0;
        const auto family = schema.family(f);
        if (family == FeatureFamily::flag_based) v = std::round(std::log1p(v));
        rec.features[f] = v;
      }
      // coarse-grained columns get address/port/protocol-like values
      rec.features[kSourceAddressIndex] = static_cast<double>((192u << 24) | (168u << 16) | (c << 8) | rng.below(256));
      rec.features[kDestinationAddressIndex] = static_cast<double>((10u << 24) | rng.below(1u << 16));
      rec.features[2] = static_cast<double>(1024 + rng.below(64000));
      rec.features[3] = static_cast<double>(c == 0 ? rng.below(1024) : 80 + 363 * (c % 2));
      rec.features[4] = rng.bernoulli(0.8) ? 6.0 : 17.0;
      ds.records.push_back(std::move(rec));
    }
  }
  return ds;
}

}  // namespace nids::dataset
