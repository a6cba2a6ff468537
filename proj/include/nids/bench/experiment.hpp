#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nids/bench/config.hpp"
#include "nids/dataset/scaler.hpp"
#include "nids/eval/protocol.hpp"
#include "nids/eval/stats.hpp"

namespace nids::bench {

struct HostInfo {
  std::string cpu;
  std::string kernels;  // active SIMD table
  unsigned threads = 0;
  std::string compiler;
};

HostInfo host_info();

struct AlgorithmResult {
  std::string name;
  eval::CrossValidation cv;
};

struct RunReport {
  nlohmann::json config;  // resolved snapshot, defaults expanded
  std::vector<std::string> classes;
  std::size_t records = 0;
  std::vector<AlgorithmResult> results;
  std::vector<eval::TimingRecord> timing;
  HostInfo host;
};

/// Load, clean, encode and rebalance per the dataset section.
dataset::FlowDataset prepare_dataset(const DatasetConfig& cfg, std::uint64_t seed);

struct RunOptions {
  bool cross_validate = true;
  bool sweep = true;
};

/// Dataset preparation, cross-validation of every configured algorithm and
/// the optional size sweep. Serial; deterministic in (config, dataset)
/// apart from the timing values.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

/// Writes the report tables, the config snapshot and the figures into
/// `out_dir` and returns the paths written. Each file is replaced
/// atomically; a report with no metrics and no timing throws before
/// anything is written. Identical reports give byte-identical files.
std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& out_dir);

/// A trained learner with the scaler and class names needed to apply it.
struct ModelFile {
  AlgorithmConfig algorithm;
  std::vector<std::string> classes;
  dataset::MinMaxScaler scaler;
  bool include_addresses = false;
  std::uint64_t seed = 0;
};

void save_model(const std::filesystem::path& path, const ModelFile& meta, const Learner& learner);
/// Throws DataError on a file of the wrong kind or a truncated payload.
std::unique_ptr<Learner> load_model(const std::filesystem::path& path, ModelFile& meta);

}  // namespace nids::bench
