#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nids/eval/classifier.hpp"
#include "nids/io/binary.hpp"

namespace nids::bench {

enum class Family { dense, deep, wisard, competitive };

/// A registry name plus its hyperparameters with every default filled in.
struct AlgorithmConfig {
  std::string name;
  nlohmann::json params;

  friend bool operator==(const AlgorithmConfig&, const AlgorithmConfig&) = default;
};

/// mlp1 deep2 deep3 cnn rnn lstm gru wisard lvq1 olvq1 lvq2 lvq3 som
const std::vector<std::string>& algorithm_names();
bool is_algorithm(std::string_view name);
Family family_of(std::string_view name);
/// Plot and log label, e.g. "Deep-2".
std::string display_name(std::string_view name);

/// Default hyperparameters for `name`. Throws ConfigError(field) for an
/// unknown name.
nlohmann::json default_params(std::string_view name, const std::string& field = "name");

/// Accepts either a bare name or {"name": ..., "params": {...}}. Overrides
/// must use known keys and the default's JSON type; values are range-checked.
/// `field` prefixes error paths, e.g. "algorithms[2]".
AlgorithmConfig resolve_algorithm(const nlohmann::json& entry, const std::string& field);

/// A classifier that can also be written to a model file.
class Learner : public eval::Classifier {
 public:
  virtual void save(io::Writer& out) const = 0;
  virtual void load(io::Reader& in) = 0;
};

std::unique_ptr<Learner> make_learner(const AlgorithmConfig& cfg, std::uint64_t seed);
eval::ClassifierFactory make_factory(const AlgorithmConfig& cfg);

}  // namespace nids::bench
