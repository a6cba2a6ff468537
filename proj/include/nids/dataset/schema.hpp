#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nids::dataset {

enum class FeatureFamily { coarse_grained, time_based, flow_based, packet_based, byte_based, flag_based };

std::string_view to_string(FeatureFamily family) noexcept;

/// Ordered feature names with their macro-class. The canonical instance is
/// `flow_schema()`; other instances exist mostly in tests.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Throws std::invalid_argument when names repeat or the lists differ in length.
  FeatureSchema(std::vector<std::string> names, std::vector<FeatureFamily> families);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<FeatureFamily>& families() const noexcept { return families_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  FeatureFamily family(std::size_t i) const { return families_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Features holding dotted-quad IPv4 addresses in CSV form.
  bool is_address(std::size_t i) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<FeatureFamily> families_;
};

/// The 78 flow features in six families (coarse-grained, time, flow, packet,
/// byte, flag), named after CICFlowMeter's CSV headers.
const FeatureSchema& flow_schema();

inline constexpr std::size_t kFlowFeatureCount = 78;
inline constexpr std::size_t kSourceAddressIndex = 0;
inline constexpr std::size_t kDestinationAddressIndex = 1;

/// Maps alternative CSV header spellings onto schema names. Lookup is
/// whitespace-trimmed and case-insensitive.
class AliasTable {
 public:
  void add(std::string_view alias, std::string_view canonical);
  std::optional<std::string> resolve(std::string_view header) const;
  std::size_t size() const noexcept { return map_.size(); }

 private:
  std::unordered_map<std::string, std::string> map_;
};

/// Header spellings used by the CIC-IDS-2017, CSE-CIC-IDS2018 and
/// CICFlowMeter-V4 exports.
AliasTable default_aliases();

/// Reads "alias,canonical" lines (a header line is optional; '#' starts a
/// comment) and layers them over `base`.
AliasTable load_aliases(const std::filesystem::path& path, AliasTable base = default_aliases());

/// Lower-cased and trimmed, the normal form used for header matching.
std::string normalize_header(std::string_view header);

}  // namespace nids::dataset
