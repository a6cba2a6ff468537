#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/dataset/schema.hpp"

namespace nids::dataset {

struct FlowRecord {
  std::vector<double> features;
  std::uint32_t label = 0;  // index into FlowDataset::label_vocab

  friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

struct FlowDataset {
  FeatureSchema schema;
  std::vector<FlowRecord> records;
  std::vector<std::string> label_vocab;
  std::string source;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }

  /// Throws DataError if a record has the wrong width or a label outside the vocabulary.
  void validate() const;

  friend bool operator==(const FlowDataset&, const FlowDataset&) = default;
};

enum class LabelMode { single_class, multi_class };

struct LoadOptions {
  std::string label_column = "Label";
  AliasTable aliases = default_aliases();
  /// Schema columns absent from the header are zero-filled (with a warning)
  /// instead of failing the load. Some public releases omit a few flag counters.
  bool allow_missing_columns = false;
};

/// Reads a comma-separated flow file with a header row. Columns are matched
/// to `schema` by name (through the alias table); unknown columns are
/// dropped. "NaN", "Infinity", "-Infinity" and empty cells load as
/// non-finite values. Address columns accept dotted-quad IPv4 text.
FlowDataset load_flow_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                          const LoadOptions& options = {});

/// Writes the dataset in the same format `load_flow_csv` reads; values use
/// round-trip precision.
void write_flow_csv(const FlowDataset& ds, const std::filesystem::path& path);

/// Concatenates datasets sharing a schema; label vocabularies are merged by name.
FlowDataset concat(const std::vector<FlowDataset>& parts);

/// Drops rows holding a non-finite feature and exact duplicates (features and
/// label), keeping the first occurrence. Throws DataError if nothing remains.
FlowDataset clean(const FlowDataset& ds);

/// Seeded uniform undersampling to `n_total` records with per-class counts
/// differing by at most one. Throws DataError naming any class too small to
/// meet its quota.
FlowDataset rebalance(const FlowDataset& ds, std::size_t n_total, std::uint64_t seed);

/// single_class: vocabulary {benign, malign}; multi_class: original names
/// with the benign class first. Throws DataError on labels outside the
/// vocabulary or when the result has fewer than two populated classes.
FlowDataset encode_labels(const FlowDataset& ds, LabelMode mode);

bool is_benign_label(std::string_view name);

std::vector<std::size_t> class_counts(const FlowDataset& ds);

/// Which schema columns feed the learners. Source/destination addresses stay
/// out unless `include_addresses` is set.
struct FeatureSelection {
  bool include_addresses = false;
};

std::vector<std::size_t> input_columns(const FeatureSchema& schema, const FeatureSelection& sel);

/// Row-per-record design matrix over `columns`.
Matrix design_matrix(const FlowDataset& ds, const std::vector<std::size_t>& columns);

std::vector<int> label_vector(const FlowDataset& ds);

/// Subset of records by index, same schema and vocabulary.
FlowDataset select(const FlowDataset& ds, const std::vector<std::size_t>& indices);

/// Dotted-quad IPv4 to its 32-bit value; nullopt if the text is not an address.
std::optional<std::uint32_t> parse_ipv4(std::string_view text);

}  // namespace nids::dataset
