#include "nids/dataset/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "nids/common/error.hpp"

namespace nids::dataset {

std::string_view to_string(FeatureFamily family) noexcept {
  switch (family) {
    case FeatureFamily::coarse_grained: return "coarse-grained";
    case FeatureFamily::time_based: return "time-based";
    case FeatureFamily::flow_based: return "flow-based";
    case FeatureFamily::packet_based: return "packet-based";
    case FeatureFamily::byte_based: return "byte-based";
    case FeatureFamily::flag_based: return "flag-based";
  }
  return "unknown";
}

FeatureSchema::FeatureSchema(std::vector<std::string> names, std::vector<FeatureFamily> families)
    : names_(std::move(names)), families_(std::move(families)) {
  if (names_.size() != families_.size()) {
    throw std::invalid_argument("FeatureSchema: every feature needs exactly one family");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(normalize_header(n)).second) {
      throw std::invalid_argument("FeatureSchema: duplicate feature name '" + n + "'");
    }
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  const auto key = normalize_header(name);
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (normalize_header(names_[i]) == key) return i;
  }
  return std::nullopt;
}

bool FeatureSchema::is_address(std::size_t i) const {
  if (i >= names_.size() || families_[i] != FeatureFamily::coarse_grained) return false;
  const auto n = normalize_header(names_[i]);
  return n.ends_with(" ip") || n == "ip";
}

namespace {

struct Entry {
  const char* name;
  FeatureFamily family;
};

constexpr auto C = FeatureFamily::coarse_grained;
constexpr auto T = FeatureFamily::time_based;
constexpr auto F = FeatureFamily::flow_based;
constexpr auto P = FeatureFamily::packet_based;
constexpr auto B = FeatureFamily::byte_based;
constexpr auto G = FeatureFamily::flag_based;

// Order follows the published feature table: 5 coarse-grained, 23 time,
// 6 flow, 20 packet, 6 byte, 18 flag features.
constexpr std::array<Entry, kFlowFeatureCount> kFlowFeatures{{
    {"Source IP", C},
    {"Destination IP", C},
    {"Source Port", C},
    {"Destination Port", C},
    {"Protocol", C},
    {"Flow Duration", T},
    {"Flow IAT Mean", T},
    {"Flow IAT Std", T},
    {"Flow IAT Max", T},
    {"Flow IAT Min", T},
    {"Fwd IAT Total", T},
    {"Fwd IAT Mean", T},
    {"Fwd IAT Std", T},
    {"Fwd IAT Max", T},
    {"Fwd IAT Min", T},
    {"Bwd IAT Total", T},
    {"Bwd IAT Mean", T},
    {"Bwd IAT Std", T},
    {"Bwd IAT Max", T},
    {"Bwd IAT Min", T},
    {"Active Mean", T},
    {"Active Std", T},
    {"Active Min", T},
    {"Active Max", T},
    {"Idle Mean", T},
    {"Idle Std", T},
    {"Idle Min", T},
    {"Idle Max", T},
    {"Flow Bytes/s", F},
    {"Flow Packets/s", F},
    {"Subflow Fwd Packets", F},
    {"Subflow Bwd Packets", F},
    {"Subflow Fwd Bytes", F},
    {"Subflow Bwd Bytes", F},
    {"Total Fwd Packets", P},
    {"Total Length of Fwd Packets", P},
    {"Packet Length Mean", P},
    {"Packet Length Std", P},
    {"Packet Length Variance", P},
    {"Fwd Packet Length Mean", P},
    {"Fwd Packet Length Std", P},
    {"Fwd Packet Length Max", P},
    {"Fwd Packet Length Min", P},
    {"Total Backward Packets", P},
    {"Total Length of Bwd Packets", P},
    {"Bwd Packet Length Mean", P},
    {"Bwd Packet Length Std", P},
    {"Bwd Packet Length Max", P},
    {"Bwd Packet Length Min", P},
    {"Fwd Avg Packets/Bulk", P},
    {"Bwd Avg Packets/Bulk", P},
    {"Fwd Packets/s", P},
    {"Bwd Packets/s", P},
    {"min_seg_size_forward", P},
    {"Fwd Avg Bytes/Bulk", B},
    {"Bwd Avg Bytes/Bulk", B},
    {"Init_Win_bytes_forward", B},
    {"Init_Win_bytes_backward", B},
    {"Fwd Header Length", B},
    {"Bwd Header Length", B},
    {"Fwd URG Flags", G},
    {"Fwd PSH Flags", G},
    {"Fwd FIN Flags", G},
    {"Fwd SYN Flags", G},
    {"Fwd RST Flags", G},
    {"Fwd ACK Flags", G},
    {"Bwd URG Flags", G},
    {"Bwd PSH Flags", G},
    {"Bwd FIN Flags", G},
    {"Bwd SYN Flags", G},
    {"Bwd RST Flags", G},
    {"Bwd ACK Flags", G},
    {"PSH Flag Count", G},
    {"FIN Flag Count", G},
    {"SYN Flag Count", G},
    {"RST Flag Count", G},
    {"ACK Flag Count", G},
    {"ECE Flag Count", G},
}};

// alias -> canonical
constexpr std::pair<const char*, const char*> kDefaultAliases[] = {
    {"Src IP", "Source IP"},
    {"Dst IP", "Destination IP"},
    {"Src Port", "Source Port"},
    {"Dst Port", "Destination Port"},
    {"Fwd IAT Tot", "Fwd IAT Total"},
    {"Bwd IAT Tot", "Bwd IAT Total"},
    {"Flow Byts/s", "Flow Bytes/s"},
    {"Flow Pkts/s", "Flow Packets/s"},
    {"Subflow Fwd Pkts", "Subflow Fwd Packets"},
    {"Subflow Bwd Pkts", "Subflow Bwd Packets"},
    {"Subflow Fwd Byts", "Subflow Fwd Bytes"},
    {"Subflow Bwd Byts", "Subflow Bwd Bytes"},
    {"Tot Fwd Pkts", "Total Fwd Packets"},
    {"Total Fwd Packet", "Total Fwd Packets"},
    {"TotLen Fwd Pkts", "Total Length of Fwd Packets"},
    {"Total Length of Fwd Packet", "Total Length of Fwd Packets"},
    {"Pkt Len Mean", "Packet Length Mean"},
    {"Pkt Len Std", "Packet Length Std"},
    {"Pkt Len Var", "Packet Length Variance"},
    {"Fwd Pkt Len Mean", "Fwd Packet Length Mean"},
    {"Fwd Pkt Len Std", "Fwd Packet Length Std"},
    {"Fwd Pkt Len Max", "Fwd Packet Length Max"},
    {"Fwd Pkt Len Min", "Fwd Packet Length Min"},
    {"Tot Bwd Pkts", "Total Backward Packets"},
    {"Total Bwd packets", "Total Backward Packets"},
    {"TotLen Bwd Pkts", "Total Length of Bwd Packets"},
    {"Total Length of Bwd Packet", "Total Length of Bwd Packets"},
    {"Bwd Pkt Len Mean", "Bwd Packet Length Mean"},
    {"Bwd Pkt Len Std", "Bwd Packet Length Std"},
    {"Bwd Pkt Len Max", "Bwd Packet Length Max"},
    {"Bwd Pkt Len Min", "Bwd Packet Length Min"},
    {"Fwd Pkts/b Avg", "Fwd Avg Packets/Bulk"},
    {"Fwd Packet/Bulk Avg", "Fwd Avg Packets/Bulk"},
    {"Bwd Pkts/b Avg", "Bwd Avg Packets/Bulk"},
    {"Bwd Packet/Bulk Avg", "Bwd Avg Packets/Bulk"},
    {"Fwd Pkts/s", "Fwd Packets/s"},
    {"Bwd Pkts/s", "Bwd Packets/s"},
    {"Fwd Seg Size Min", "min_seg_size_forward"},
    {"Fwd Byts/b Avg", "Fwd Avg Bytes/Bulk"},
    {"Fwd Bytes/Bulk Avg", "Fwd Avg Bytes/Bulk"},
    {"Bwd Byts/b Avg", "Bwd Avg Bytes/Bulk"},
    {"Bwd Bytes/Bulk Avg", "Bwd Avg Bytes/Bulk"},
    {"Init Fwd Win Byts", "Init_Win_bytes_forward"},
    {"FWD Init Win Bytes", "Init_Win_bytes_forward"},
    {"Init Bwd Win Byts", "Init_Win_bytes_backward"},
    {"Bwd Init Win Bytes", "Init_Win_bytes_backward"},
    {"Fwd Header Len", "Fwd Header Length"},
    {"Bwd Header Len", "Bwd Header Length"},
    {"PSH Flag Cnt", "PSH Flag Count"},
    {"FIN Flag Cnt", "FIN Flag Count"},
    {"SYN Flag Cnt", "SYN Flag Count"},
    {"RST Flag Cnt", "RST Flag Count"},
    {"ACK Flag Cnt", "ACK Flag Count"},
    {"ECE Flag Cnt", "ECE Flag Count"},
};

}  // namespace

const FeatureSchema& flow_schema() {
  static const FeatureSchema schema = [] {
    std::vector<std::string> names;
    std::vector<FeatureFamily> families;
    for (const auto& e : kFlowFeatures) {
      names.emplace_back(e.name);
      families.push_back(e.family);
    }
    return FeatureSchema(std::move(names), std::move(families));
  }();
  return schema;
}

std::string normalize_header(std::string_view header) {
  const auto first = header.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = header.find_last_not_of(" \t\r\n\"");
  std::string out(header.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void AliasTable::add(std::string_view alias, std::string_view canonical) {
  map_[normalize_header(alias)] = std::string(canonical);
}

std::optional<std::string> AliasTable::resolve(std::string_view header) const {
  const auto it = map_.find(normalize_header(header));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

AliasTable default_aliases() {
  AliasTable table;
  for (const auto& [alias, canonical] : kDefaultAliases) table.add(alias, canonical);
  return table;
}

AliasTable load_aliases(const std::filesystem::path& path, AliasTable base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alias table '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (normalize_header(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw CsvError(line_no, "alias line needs 'alias,canonical'");
    const auto alias = line.substr(0, comma);
    auto canonical = line.substr(comma + 1);
    canonical.erase(0, canonical.find_first_not_of(" \t"));
    canonical.erase(canonical.find_last_not_of(" \t\r") + 1);
    if (line_no == 1 && normalize_header(alias) == "alias") continue;
    // Keep the schema's spelling of the canonical name when it is known.
    const auto idx = flow_schema().index_of(canonical);
    base.add(alias, idx ? flow_schema().name(*idx) : canonical);
  }
  return base;
}

}  // namespace nids::dataset
