#include "nids/bench/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "nids/common/error.hpp"

namespace nids::bench {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(field, "must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(field + "." + key, "unknown key");
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& field, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field + "." + key, "wrong type: " + j.at(key).dump());
  }
}

std::size_t get_count(const json& j, const char* key, const std::string& field, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(field + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string to_string(dataset::LabelMode mode) {
  return mode == dataset::LabelMode::single_class ? "single" : "multi";
}

dataset::LabelMode parse_label_mode(const std::string& text, const std::string& field) {
  if (text == "single") return dataset::LabelMode::single_class;
  if (text == "multi") return dataset::LabelMode::multi_class;
  throw ConfigError(field, "label mode must be 'single' or 'multi', got '" + text + "'");
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv(kOutputRootVariable); env != nullptr && *env != '\0') return env;
  return "results";
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  only_keys(j, "config", {"dataset", "algorithms", "evaluation", "output"});
  ExperimentConfig c;

  const json ds = j.value("dataset", json::object());
  only_keys(ds, "dataset",
            {"paths", "label_mode", "label_column", "aliases", "allow_missing_columns", "clean", "rebalance",
             "include_addresses"});
  if (ds.contains("paths")) {
    const auto& paths = ds.at("paths");
    if (!paths.is_array()) throw ConfigError("dataset.paths", "must be a list of file paths");
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (!paths[i].is_string()) throw ConfigError("dataset.paths[" + std::to_string(i) + "]", "must be a string");
      std::filesystem::path p = paths[i].get<std::string>();
      c.dataset.paths.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
    }
  }
  c.dataset.label_mode = parse_label_mode(get<std::string>(ds, "label_mode", "dataset", "single"), "dataset.label_mode");
  c.dataset.label_column = get<std::string>(ds, "label_column", "dataset", c.dataset.label_column);
  if (ds.contains("aliases")) {
    std::filesystem::path p = get<std::string>(ds, "aliases", "dataset", "");
    c.dataset.aliases = p.is_relative() && !base_dir.empty() && !p.empty() ? base_dir / p : p;
  }
  c.dataset.allow_missing_columns = get<bool>(ds, "allow_missing_columns", "dataset", false);
  c.dataset.clean = get<bool>(ds, "clean", "dataset", true);
  c.dataset.rebalance = get_count(ds, "rebalance", "dataset", c.dataset.rebalance);
  c.dataset.include_addresses = get<bool>(ds, "include_addresses", "dataset", false);

  if (!j.contains("algorithms")) throw ConfigError("algorithms", "at least one algorithm required");
  const auto& algos = j.at("algorithms");
  if (!algos.is_array() || algos.empty()) throw ConfigError("algorithms", "must be a non-empty list");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < algos.size(); ++i) {
    const std::string field = "algorithms[" + std::to_string(i) + "]";
    auto a = resolve_algorithm(algos[i], field);
    if (!seen.insert(a.name).second) throw ConfigError(field, "'" + a.name + "' listed twice");
    c.algorithms.push_back(std::move(a));
  }

  const json ev = j.value("evaluation", json::object());
  only_keys(ev, "evaluation", {"folds", "seed", "sweep", "track_mse"});
  c.evaluation.folds = get_count(ev, "folds", "evaluation", c.evaluation.folds);
  if (c.evaluation.folds < 2) throw ConfigError("evaluation.folds", "need at least 2 folds");
  c.evaluation.seed = get_count(ev, "seed", "evaluation", c.evaluation.seed);
  if (ev.contains("sweep")) {
    const auto& sweep = ev.at("sweep");
    if (!sweep.is_array()) throw ConfigError("evaluation.sweep", "must be a list of sizes");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (!sweep[i].is_number_integer() || sweep[i].get<long long>() <= 0) {
        throw ConfigError("evaluation.sweep[" + std::to_string(i) + "]", "sizes must be positive integers");
      }
      c.evaluation.sweep.push_back(sweep[i].get<std::size_t>());
    }
  }
  c.evaluation.track_mse = get<bool>(ev, "track_mse", "evaluation", true);

  const json out = j.value("output", json::object());
  only_keys(out, "output", {"directory"});
  c.output = get<std::string>(out, "directory", "output", default_output_root().string());
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json paths = json::array();
  for (const auto& p : c.dataset.paths) paths.push_back(p.string());
  json algos = json::array();
  for (const auto& a : c.algorithms) algos.push_back({{"name", a.name}, {"params", a.params}});
  return {
      {"dataset",
       {{"paths", paths},
        {"label_mode", to_string(c.dataset.label_mode)},
        {"label_column", c.dataset.label_column},
        {"aliases", c.dataset.aliases.string()},
        {"allow_missing_columns", c.dataset.allow_missing_columns},
        {"clean", c.dataset.clean},
        {"rebalance", c.dataset.rebalance},
        {"include_addresses", c.dataset.include_addresses}}},
      {"algorithms", algos},
      {"evaluation",
       {{"folds", c.evaluation.folds},
        {"seed", c.evaluation.seed},
        {"sweep", c.evaluation.sweep},
        {"track_mse", c.evaluation.track_mse}}},
      {"output", {{"directory", c.output.string()}}},
  };
}

}  // namespace nids::bench
