#include "nids/bench/algorithms.hpp"

#include <algorithm>
#include <stdexcept>

#include "nids/common/error.hpp"
#include "nids/common/rng.hpp"
#include "nids/competitive/competitive.hpp"
#include "nids/deep/model.hpp"
#include "nids/mlp/trainer.hpp"
#include "nids/wisard/wisard.hpp"

namespace nids::bench {

using nlohmann::json;

namespace {

json training_defaults() {
  return {{"epochs", 100},        {"batch_size", 100}, {"optimizer", "adam"}, {"learning_rate", 0.001},
          {"momentum", 0.9},      {"beta1", 0.9},      {"beta2", 0.999},      {"epsilon", 1e-8},
          {"loss", "least_squares"}};
}

json with_training(json extra) {
  auto j = training_defaults();
  j.update(extra);
  return j;
}

std::vector<std::size_t> sizes_of(const json& j) { return j.get<std::vector<std::size_t>>(); }

mlp::TrainConfig train_config(const json& p, std::uint64_t seed) {
  mlp::TrainConfig cfg;
  cfg.epochs = p.at("epochs").get<std::size_t>();
  cfg.batch_size = p.at("batch_size").get<std::size_t>();
  cfg.optimizer.kind = mlp::parse_optimizer(p.at("optimizer").get<std::string>());
  cfg.optimizer.learning_rate = p.at("learning_rate").get<double>();
  cfg.optimizer.momentum = p.at("momentum").get<double>();
  cfg.optimizer.beta1 = p.at("beta1").get<double>();
  cfg.optimizer.beta2 = p.at("beta2").get<double>();
  cfg.optimizer.epsilon = p.at("epsilon").get<double>();
  cfg.loss = mlp::parse_loss(p.at("loss").get<std::string>());
  cfg.seed = seed;
  if (cfg.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  cfg.optimizer.validate();
  return cfg;
}

deep::DeepArchitecture deep_architecture(std::string_view name, const json& p, std::size_t inputs,
                                         std::size_t classes) {
  auto arch = deep::reference_architecture(deep::parse_deep_kind(name), inputs, classes);
  if (arch.kind == deep::DeepKind::cnn) {
    arch.conv.filters = p.at("filters").get<std::size_t>();
    arch.conv.kernel = p.at("kernel").get<std::size_t>();
    arch.pool = p.at("pool").get<std::size_t>();
    arch.dropout = p.at("dropout").get<double>();
  } else {
    arch.units = p.at("units").get<std::size_t>();
    arch.timesteps = p.at("timesteps").get<std::size_t>();
  }
  arch.head_hidden = sizes_of(p.at("head"));
  arch.validate();
  return arch;
}

wisard::RetinaConfig retina(const json& p, std::size_t features) {
  wisard::RetinaConfig r;
  r.features = features;
  r.bits_per_feature = p.at("bits_per_feature").get<std::size_t>();
  r.tuple_size = p.at("tuple_size").get<std::size_t>();
  r.validate();
  return r;
}

competitive::CompetitiveConfig competitive_config(std::string_view name, const json& p, std::uint64_t seed) {
  competitive::CompetitiveConfig c;
  c.variant = competitive::parse_variant(name);
  c.learning_rate = p.at("learning_rate").get<double>();
  c.epochs = p.at("epochs").get<std::size_t>();
  c.chunk = p.at("batch_size").get<std::size_t>();
  if (c.variant == competitive::Variant::som) {
    c.som_rows = p.at("rows").get<std::size_t>();
    c.som_cols = p.at("cols").get<std::size_t>();
    c.sigma_start = p.at("sigma_start").get<double>();
    c.sigma_end = p.at("sigma_end").get<double>();
    c.cutoff_sigmas = p.at("cutoff_sigmas").get<double>();
    c.sign_rule = competitive::parse_sign_rule(p.at("sign_rule").get<std::string>());
  } else {
    c.codebooks = p.at("codebooks").get<std::size_t>();
  }
  if (p.contains("window")) c.window = p.at("window").get<double>();
  if (p.contains("epsilon")) c.epsilon = p.at("epsilon").get<double>();
  c.seed = seed;
  c.validate();
  return c;
}

class DenseLearner final : public Learner {
 public:
  DenseLearner(AlgorithmConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {}

  std::string name() const override { return cfg_.name; }

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes) override {
    net_ = mlp::DenseNetwork::classifier(x.cols(), sizes_of(cfg_.params.at("hidden")), classes, mix_seed(seed_, 1));
    history_ = mlp::train(net_, x, y, train_config(cfg_.params, mix_seed(seed_, 2))).mse;
  }
  std::vector<int> predict(const Matrix& x) const override { return mlp::predict_classes(net_, x); }
  std::vector<double> mse_history() const override { return history_; }
  void save(io::Writer& out) const override { net_.save(out); }
  void load(io::Reader& in) override { net_ = mlp::DenseNetwork::load(in); }

 private:
  AlgorithmConfig cfg_;
  std::uint64_t seed_;
  mlp::DenseNetwork net_;
  std::vector<double> history_;
};

class DeepLearner final : public Learner {
 public:
  DeepLearner(AlgorithmConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {}

  std::string name() const override { return cfg_.name; }

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes) override {
    model_ = deep::DeepModel(deep_architecture(cfg_.name, cfg_.params, x.cols(), classes), mix_seed(seed_, 1));
    history_ = deep::train_deep(model_, x, y, train_config(cfg_.params, mix_seed(seed_, 2))).mse;
  }
  std::vector<int> predict(const Matrix& x) const override { return mlp::predict_classes(model_, x); }
  std::vector<double> mse_history() const override { return history_; }
  void save(io::Writer& out) const override { model_.save(out); }
  void load(io::Reader& in) override { model_ = deep::DeepModel::load(in); }

 private:
  AlgorithmConfig cfg_;
  std::uint64_t seed_;
  deep::DeepModel model_;
  std::vector<double> history_;
};

class WisardLearner final : public Learner {
 public:
  WisardLearner(AlgorithmConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {}

  std::string name() const override { return cfg_.name; }

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes) override {
    model_ = wisard::WisardModel(retina(cfg_.params, x.cols()), classes, seed_);
    wisard::train_dataset(model_, x, y, cfg_.params.at("batch_size").get<std::size_t>());
  }
  std::vector<int> predict(const Matrix& x) const override { return model_.predict(x); }
  void save(io::Writer& out) const override { model_.save(out); }
  void load(io::Reader& in) override { model_ = wisard::WisardModel::load(in); }

 private:
  AlgorithmConfig cfg_;
  std::uint64_t seed_;
  wisard::WisardModel model_;
};

class CompetitiveLearner final : public Learner {
 public:
  CompetitiveLearner(AlgorithmConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {}

  std::string name() const override { return cfg_.name; }

  void fit(const Matrix& x, std::span<const int> y, std::size_t) override {
    model_ = competitive::train_competitive(x, y, competitive_config(cfg_.name, cfg_.params, seed_));
  }
  std::vector<int> predict(const Matrix& x) const override { return model_.predict(x); }
  void save(io::Writer& out) const override { model_.save(out); }
  void load(io::Reader& in) override { model_ = competitive::CompetitiveModel::load(in); }

 private:
  AlgorithmConfig cfg_;
  std::uint64_t seed_;
  competitive::CompetitiveModel model_;
};

bool same_kind(const json& value, const json& reference) {
  if (reference.is_number_float()) return value.is_number();
  if (reference.is_number_integer()) return value.is_number_integer() && value.get<long long>() >= 0;
  if (reference.is_array()) {
    return value.is_array() && !value.empty() &&
           std::all_of(value.begin(), value.end(),
                       [](const json& v) { return v.is_number_integer() && v.get<long long>() > 0; });
  }
  return value.type() == reference.type();
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"mlp1", "deep2", "deep3", "cnn",   "rnn",   "lstm", "gru",
                                              "wisard", "lvq1", "olvq1", "lvq2", "lvq3", "som"};
  return names;
}

bool is_algorithm(std::string_view name) {
  const auto& n = algorithm_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

Family family_of(std::string_view name) {
  if (name == "mlp1" || name == "deep2" || name == "deep3") return Family::dense;
  if (name == "cnn" || name == "rnn" || name == "lstm" || name == "gru") return Family::deep;
  if (name == "wisard") return Family::wisard;
  if (is_algorithm(name)) return Family::competitive;
  throw ConfigError("name", "unknown algorithm '" + std::string(name) + "'");
}

std::string display_name(std::string_view name) {
  if (name == "mlp1") return "MLP-1";
  if (name == "deep2") return "Deep-2";
  if (name == "deep3") return "Deep-3";
  if (name == "wisard") return "WiSARD";
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

json default_params(std::string_view name, const std::string& field) {
  if (name == "mlp1") return with_training({{"hidden", {26}}});
  if (name == "deep2") return with_training({{"hidden", {23, 10}}});
  if (name == "deep3") return with_training({{"hidden", {20, 16, 11}}});
  if (name == "cnn") {
    return with_training({{"filters", 7}, {"kernel", 4}, {"pool", 2}, {"dropout", 0.3}, {"head", {8}}});
  }
  if (name == "rnn") return with_training({{"units", 18}, {"timesteps", 1}, {"head", {10}}});
  if (name == "lstm") return with_training({{"units", 6}, {"timesteps", 1}, {"head", {8}}});
  if (name == "gru") return with_training({{"units", 8}, {"timesteps", 1}, {"head", {10}}});
  if (name == "wisard") return {{"bits_per_feature", 16}, {"tuple_size", 8}, {"batch_size", 100}};
  json lvq{{"codebooks", 20}, {"learning_rate", 0.3}, {"epochs", 10}, {"batch_size", 100}};
  if (name == "lvq1" || name == "olvq1") return lvq;
  if (name == "lvq2") {
    lvq["window"] = 0.3;
    return lvq;
  }
  if (name == "lvq3") {
    lvq["window"] = 0.3;
    lvq["epsilon"] = 0.1;
    return lvq;
  }
  if (name == "som") {
    return {{"rows", 8},          {"cols", 8},        {"learning_rate", 0.3}, {"epochs", 10},
            {"sigma_start", 8.0}, {"sigma_end", 1.0}, {"cutoff_sigmas", 3.0}, {"batch_size", 100}, {"sign_rule", "repel_winner"}};
  }
  throw ConfigError(field, "unknown algorithm '" + std::string(name) + "'");
}

AlgorithmConfig resolve_algorithm(const json& entry, const std::string& field) {
  AlgorithmConfig cfg;
  json overrides = json::object();
  if (entry.is_string()) {
    cfg.name = entry.get<std::string>();
  } else if (entry.is_object()) {
    for (const auto& [key, value] : entry.items()) {
      if (key != "name" && key != "params") throw ConfigError(field + "." + key, "unknown key");
    }
    if (!entry.contains("name") || !entry.at("name").is_string()) {
      throw ConfigError(field + ".name", "algorithm name (string) required");
    }
    cfg.name = entry.at("name").get<std::string>();
    if (entry.contains("params")) {
      overrides = entry.at("params");
      if (!overrides.is_object()) throw ConfigError(field + ".params", "must be an object");
    }
  } else {
    throw ConfigError(field, "expected an algorithm name or object");
  }

  const std::string name_field = entry.is_string() ? field : field + ".name";
  cfg.params = default_params(cfg.name, name_field);
  for (const auto& [key, value] : overrides.items()) {
    const std::string key_field = field + ".params." + key;
    if (!cfg.params.contains(key)) throw ConfigError(key_field, "not a parameter of " + cfg.name);
    if (!same_kind(value, cfg.params.at(key))) {
      throw ConfigError(key_field, "expected a value like " + cfg.params.at(key).dump());
    }
    cfg.params[key] = value;
  }

  // Range checks go through the learners' own validation with the default
  // input width; the actual width is checked again at fit time.
  try {
    switch (family_of(cfg.name)) {
      case Family::dense:
        train_config(cfg.params, 1);
        break;
      case Family::deep:
        train_config(cfg.params, 1);
        deep::check_weight_budget(deep_architecture(cfg.name, cfg.params, 76, 2));
        break;
      case Family::wisard:
        retina(cfg.params, 76);
        if (cfg.params.at("batch_size").get<std::size_t>() == 0) throw std::invalid_argument("batch_size must be positive");
        break;
      case Family::competitive:
        competitive_config(cfg.name, cfg.params, 1);
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field + ".params", e.what());
  }
  return cfg;
}

std::unique_ptr<Learner> make_learner(const AlgorithmConfig& cfg, std::uint64_t seed) {
  switch (family_of(cfg.name)) {
    case Family::dense:
      return std::make_unique<DenseLearner>(cfg, seed);
    case Family::deep:
      return std::make_unique<DeepLearner>(cfg, seed);
    case Family::wisard:
      return std::make_unique<WisardLearner>(cfg, seed);
    case Family::competitive:
      return std::make_unique<CompetitiveLearner>(cfg, seed);
  }
  throw std::logic_error("unreachable");
}

eval::ClassifierFactory make_factory(const AlgorithmConfig& cfg) {
  return [cfg](std::uint64_t seed) -> std::unique_ptr<eval::Classifier> { return make_learner(cfg, seed); };
}

}  // namespace nids::bench
