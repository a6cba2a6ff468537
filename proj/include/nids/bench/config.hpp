#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nids/bench/algorithms.hpp"
#include "nids/dataset/flow_dataset.hpp"

namespace nids::bench {

struct DatasetConfig {
  std::vector<std::filesystem::path> paths;
  dataset::LabelMode label_mode = dataset::LabelMode::single_class;
  std::string label_column = "Label";
  /// Extra header aliases (two-column CSV), merged over the built-in table.
  std::filesystem::path aliases;
  bool allow_missing_columns = false;
  bool clean = true;
  /// Balanced undersampling target; 0 keeps every record.
  std::size_t rebalance = 20000;
  bool include_addresses = false;

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

struct EvaluationConfig {
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  /// Size sweep for the timing study; empty skips it.
  std::vector<std::size_t> sweep;
  /// Keep the fold-averaged training MSE of learners that report one.
  bool track_mse = true;

  friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::vector<AlgorithmConfig> algorithms;
  EvaluationConfig evaluation;
  std::filesystem::path output = "results";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError naming the offending key on unknown keys, wrong
/// types or out-of-range values. Relative dataset paths are resolved
/// against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully expanded form; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& c);

/// Output root used when neither the config nor the command line sets one.
std::filesystem::path default_output_root();
inline constexpr const char* kOutputRootVariable = "NIDS_OUTPUT_ROOT";

std::string to_string(dataset::LabelMode mode);
dataset::LabelMode parse_label_mode(const std::string& text, const std::string& field);

}  // namespace nids::bench
