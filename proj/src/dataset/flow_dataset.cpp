#include "nids/dataset/flow_dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <unordered_set>

#include "nids/common/error.hpp"
#include "nids/common/log.hpp"
#include "nids/common/rng.hpp"
#include "nids/dataset/csv.hpp"

namespace nids::dataset {

void FlowDataset::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].features.size() != schema.size()) {
      throw DataError("record " + std::to_string(i) + " has " +
                      std::to_string(records[i].features.size()) + " features, schema has " +
                      std::to_string(schema.size()));
    }
    if (records[i].label >= label_vocab.size()) {
      throw DataError("record " + std::to_string(i) + " carries a label outside the vocabulary");
    }
  }
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned part = 0;
    auto [next, ec] = std::from_chars(p, end, part);
    if (ec != std::errc{} || next == p || part > 255) return std::nullopt;
    value = (value << 8) | part;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return value;
}

namespace {

std::optional<double> parse_value(std::string_view cell, bool address) {
  cell = trim(cell);
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto lower = normalize_header(cell);
  if (lower == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (lower == "infinity" || lower == "+infinity" || lower == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (lower == "-infinity" || lower == "-inf") return -std::numeric_limits<double>::infinity();
  if (address) {
    if (auto ip = parse_ipv4(cell)) return static_cast<double>(*ip);
  }
  const char* first = cell.data();
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FlowDataset load_flow_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                          const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open flow file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw CsvError(1, "missing header row");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  const auto header = split_csv_line(line);

  // column index in file for each schema feature, and for the label
  std::vector<std::optional<std::size_t>> column_of(schema.size());
  std::optional<std::size_t> label_col;
  const auto label_key = normalize_header(options.label_column);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto key = normalize_header(header[c]);
    if (key == label_key) {
      if (!label_col) label_col = c;
      continue;
    }
    auto idx = schema.index_of(header[c]);
    if (!idx) {
      if (auto canonical = options.aliases.resolve(header[c])) idx = schema.index_of(*canonical);
    }
    // Duplicated headers (some releases repeat "Fwd Header Length") keep the first.
    if (idx && !column_of[*idx]) column_of[*idx] = c;
  }
  if (!label_col) throw CsvError(1, "header has no label column '" + options.label_column + "'");
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (column_of[f]) continue;
    if (!options.allow_missing_columns) {
      throw CsvError(1, "header is missing schema column '" + schema.name(f) + "'");
    }
    log::warn("'" + path.string() + "': column '" + schema.name(f) + "' absent, zero-filled");
  }

  FlowDataset ds;
  ds.schema = schema;
  ds.source = path.string();
  std::map<std::string, std::uint32_t, std::less<>> label_index;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(cells.size()));
    }
    FlowRecord rec;
    rec.features.resize(schema.size(), 0.0);
    for (std::size_t f = 0; f < schema.size(); ++f) {
      if (!column_of[f]) continue;
      const auto value = parse_value(cells[*column_of[f]], schema.is_address(f));
      if (!value) {
        throw CsvError(line_no, "column '" + schema.name(f) + "': cannot parse '" +
                                    std::string(cells[*column_of[f]]) + "'");
      }
      rec.features[f] = *value;
    }
    const std::string label(trim(cells[*label_col]));
    if (label.empty()) throw CsvError(line_no, "empty label");
    auto [it, inserted] = label_index.try_emplace(label, static_cast<std::uint32_t>(ds.label_vocab.size()));
    if (inserted) ds.label_vocab.push_back(label);
    rec.label = it->second;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

void write_flow_csv(const FlowDataset& ds, const std::filesystem::path& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& name : ds.schema.names()) out << quote_csv(name) << ',';
  out << "Label\n";
  for (const auto& rec : ds.records) {
    for (double v : rec.features) out << format_value(v) << ',';
    out << quote_csv(ds.label_vocab[rec.label]) << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

FlowDataset concat(const std::vector<FlowDataset>& parts) {
  if (parts.empty()) throw DataError("concat: no datasets given");
  FlowDataset out;
  out.schema = parts.front().schema;
  std::map<std::string, std::uint32_t, std::less<>> index;
  for (const auto& part : parts) {
    if (!(part.schema == out.schema)) throw DataError("concat: schemas differ");
    if (!out.source.empty()) out.source += ';';
    out.source += part.source;
    std::vector<std::uint32_t> remap(part.label_vocab.size());
    for (std::size_t l = 0; l < part.label_vocab.size(); ++l) {
      auto [it, inserted] = index.try_emplace(part.label_vocab[l],
                                              static_cast<std::uint32_t>(out.label_vocab.size()));
      if (inserted) out.label_vocab.push_back(part.label_vocab[l]);
      remap[l] = it->second;
    }
    for (const auto& rec : part.records) {
      out.records.push_back({rec.features, remap.at(rec.label)});
    }
  }
  return out;
}

namespace {

struct RecordHash {
  std::size_t operator()(const FlowRecord* r) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ r->label;
    for (double v : r->features) {
      if (v == 0.0) v = 0.0;  // -0 and +0 compare equal, so hash them alike
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = (h ^ bits) * 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

struct RecordEqual {
  bool operator()(const FlowRecord* a, const FlowRecord* b) const noexcept { return *a == *b; }
};

}  // namespace

FlowDataset clean(const FlowDataset& ds) {
  FlowDataset out;
  out.schema = ds.schema;
  out.label_vocab = ds.label_vocab;
  out.source = ds.source;
  std::unordered_set<const FlowRecord*, RecordHash, RecordEqual> seen;
  seen.reserve(ds.records.size());
  std::size_t non_finite = 0;
  std::size_t duplicates = 0;
  for (const auto& rec : ds.records) {
    if (!std::all_of(rec.features.begin(), rec.features.end(), [](double v) { return std::isfinite(v); })) {
      ++non_finite;
      continue;
    }
    if (!seen.insert(&rec).second) {
      ++duplicates;
      continue;
    }
    out.records.push_back(rec);
  }
  if (out.records.empty()) throw DataError("cleaning left an empty dataset");
  if (non_finite + duplicates > 0) {
    log::debug("clean: dropped " + std::to_string(non_finite) + " non-finite and " +
               std::to_string(duplicates) + " duplicate rows");
  }
  return out;
}

std::vector<std::size_t> class_counts(const FlowDataset& ds) {
  std::vector<std::size_t> counts(ds.label_vocab.size(), 0);
  for (const auto& rec : ds.records) ++counts.at(rec.label);
  return counts;
}

FlowDataset rebalance(const FlowDataset& ds, std::size_t n_total, std::uint64_t seed) {
  ds.validate();
  const std::size_t classes = ds.label_vocab.size();
  if (classes == 0) throw DataError("rebalance: empty label vocabulary");
  if (n_total < classes) throw DataError("rebalance: n_total smaller than the class count");

  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < ds.records.size(); ++i) members[ds.records[i].label].push_back(i);

  const std::size_t quota = n_total / classes;
  std::vector<std::size_t> target(classes, quota);
  for (std::size_t c = 0; c < classes; ++c) {
    if (members[c].size() < quota) {
      throw DataError("rebalance: class '" + ds.label_vocab[c] + "' has " +
                      std::to_string(members[c].size()) + " records, quota is " + std::to_string(quota));
    }
  }
  std::size_t remainder = n_total - quota * classes;
  for (std::size_t c = 0; c < classes && remainder > 0; ++c) {
    if (members[c].size() > quota) {
      ++target[c];
      --remainder;
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n_total);
  for (std::size_t c = 0; c < classes; ++c) {
    auto& m = members[c];
    // partial Fisher-Yates: the first target[c] slots form the sample
    for (std::size_t i = 0; i < target[c]; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(m.size() - i));
      std::swap(m[i], m[j]);
    }
    chosen.insert(chosen.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(target[c]));
  }
  std::sort(chosen.begin(), chosen.end());
  return select(ds, chosen);
}

bool is_benign_label(std::string_view name) { return normalize_header(name) == "benign"; }

FlowDataset encode_labels(const FlowDataset& ds, LabelMode mode) {
  if (ds.label_vocab.empty()) throw DataError("encode_labels: empty label vocabulary");
  for (const auto& rec : ds.records) {
    if (rec.label >= ds.label_vocab.size()) throw DataError("encode_labels: unknown label index");
  }

  std::vector<std::uint32_t> remap(ds.label_vocab.size());
  FlowDataset out;
  out.schema = ds.schema;
  out.source = ds.source;

  if (mode == LabelMode::single_class) {
    out.label_vocab = {"benign", "malign"};
    for (std::size_t l = 0; l < ds.label_vocab.size(); ++l) remap[l] = is_benign_label(ds.label_vocab[l]) ? 0 : 1;
  } else {
    std::vector<std::size_t> order;
    for (std::size_t l = 0; l < ds.label_vocab.size(); ++l) {
      if (is_benign_label(ds.label_vocab[l])) order.push_back(l);
    }
    for (std::size_t l = 0; l < ds.label_vocab.size(); ++l) {
      if (!is_benign_label(ds.label_vocab[l])) order.push_back(l);
    }
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      remap[order[pos]] = static_cast<std::uint32_t>(pos);
      out.label_vocab.push_back(ds.label_vocab[order[pos]]);
    }
  }

  out.records.reserve(ds.records.size());
  for (const auto& rec : ds.records) out.records.push_back({rec.features, remap[rec.label]});

  const auto counts = class_counts(out);
  const auto populated = std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; });
  if (populated < 2) throw DataError("encode_labels: fewer than two populated classes");
  return out;
}

std::vector<std::size_t> input_columns(const FeatureSchema& schema, const FeatureSelection& sel) {
  std::vector<std::size_t> cols;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (!sel.include_addresses && schema.is_address(f)) continue;
    cols.push_back(f);
  }
  return cols;
}

Matrix design_matrix(const FlowDataset& ds, const std::vector<std::size_t>& columns) {
  Matrix x(ds.records.size(), columns.size());
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const auto& features = ds.records[r].features;
    for (std::size_t c = 0; c < columns.size(); ++c) x(r, c) = features.at(columns[c]);
  }
  return x;
}

std::vector<int> label_vector(const FlowDataset& ds) {
  std::vector<int> y;
  y.reserve(ds.records.size());
  for (const auto& rec : ds.records) y.push_back(static_cast<int>(rec.label));
  return y;
}

FlowDataset select(const FlowDataset& ds, const std::vector<std::size_t>& indices) {
  FlowDataset out;
  out.schema = ds.schema;
  out.label_vocab = ds.label_vocab;
  out.source = ds.source;
  out.records.reserve(indices.size());
  for (auto i : indices) out.records.push_back(ds.records.at(i));
  return out;
}

}  // namespace nids::dataset
