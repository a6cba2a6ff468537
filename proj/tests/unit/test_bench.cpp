#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "nids/bench/experiment.hpp"
#include "nids/bench/plot.hpp"
#include "nids/common/error.hpp"
#include "nids/common/log.hpp"
#include "nids/dataset/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace nids;
using namespace nids::bench;
using nlohmann::json;

namespace {

struct QuietLog {
  QuietLog() { previous = log::set_sink(nullptr); }
  ~QuietLog() { log::set_sink(previous); }
  log::Sink previous;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::size_t lines(const std::string& text) { return count(text, "\n"); }

std::filesystem::path sample() { return std::filesystem::path(NIDS_SOURCE_DIR) / "data" / "sample_flows.csv"; }

// Field named by the ConfigError thrown from `fn`, or "" if none was thrown.
template <typename F>
std::string config_field(F&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

json minimal(const std::string& algo = "lvq1") {
  return {{"dataset", {{"paths", {sample().string()}}, {"rebalance", 0}}},
          {"algorithms", {algo}},
          {"evaluation", {{"folds", 2}}}};
}

RunReport small_report(const std::vector<std::string>& algos) {
  auto j = minimal();
  j["algorithms"] = algos;
  return run_experiment(parse_config(j));
}

std::size_t polyline_vertices(const std::string& svg) {
  const std::regex points("points=\"([^\"]*)\"");
  std::smatch m;
  if (!std::regex_search(svg, m, points)) return 0;
  const std::string p = m[1];
  return p.empty() ? 0 : count(p, " ") + 1;
}

}  // namespace

TEST_CASE("algorithm defaults") {
  const auto mlp = default_params("mlp1");
  CHECK(mlp["hidden"] == json({26}));
  CHECK(mlp["optimizer"] == "adam");
  CHECK(mlp["learning_rate"] == 0.001);
  CHECK(mlp["beta1"] == 0.9);
  CHECK(mlp["epochs"] == 100);
  CHECK(default_params("deep2")["hidden"] == json({23, 10}));
  CHECK(default_params("deep3")["hidden"] == json({20, 16, 11}));
  const auto cnn = default_params("cnn");
  CHECK(cnn["filters"] == 7);
  CHECK(cnn["kernel"] == 4);
  CHECK(cnn["pool"] == 2);
  CHECK(cnn["dropout"] == 0.3);
  CHECK(cnn["head"] == json({8}));
  CHECK(default_params("rnn")["units"] == 18);
  CHECK(default_params("lstm")["units"] == 6);
  CHECK(default_params("gru")["units"] == 8);
  CHECK(default_params("wisard")["tuple_size"] == 8);
  CHECK(default_params("wisard")["batch_size"] == 100);
  for (const char* lvq : {"lvq1", "lvq2", "lvq3"}) {
    CHECK(default_params(lvq)["learning_rate"] == 0.3);
    CHECK(default_params(lvq)["codebooks"] == 20);
  }
  CHECK(default_params("lvq2")["window"] == 0.3);
  CHECK(default_params("lvq3")["epsilon"] == 0.1);
  CHECK(default_params("som")["sigma_start"] == 8.0);
  CHECK(default_params("som")["learning_rate"] == 0.3);
  CHECK(algorithm_names().size() == 13);
  for (const auto& name : algorithm_names()) CHECK_NOTHROW(resolve_algorithm(name, "a"));
}

TEST_CASE("config validation names the offending field") {
  CHECK(config_field([] { parse_config(minimal("mlp9")); }) == "algorithms[0]");
  auto j = minimal();
  j["algorithms"] = json::array({"lvq1", {{"name", "mlp9"}}});
  CHECK(config_field([&] { parse_config(j); }) == "algorithms[1].name");
  j["algorithms"] = json::array({{{"name", "lvq1"}, {"params", {{"learning_rate", 1.5}}}}});
  CHECK(config_field([&] { parse_config(j); }) == "algorithms[0].params");
  j["algorithms"] = json::array({{{"name", "lvq1"}, {"params", {{"hidden", {3}}}}}});
  CHECK(config_field([&] { parse_config(j); }) == "algorithms[0].params.hidden");
  j["algorithms"] = json::array({{{"name", "mlp1"}, {"params", {{"epochs", "many"}}}}});
  CHECK(config_field([&] { parse_config(j); }) == "algorithms[0].params.epochs");
  j["algorithms"] = json::array({"wisard", "wisard"});
  CHECK(config_field([&] { parse_config(j); }) == "algorithms[1]");

  auto k = minimal();
  k["evaluation"]["folds"] = 1;
  CHECK(config_field([&] { parse_config(k); }) == "evaluation.folds");
  k = minimal();
  k["dataset"]["label_mode"] = "both";
  CHECK(config_field([&] { parse_config(k); }) == "dataset.label_mode");
  k = minimal();
  k["extra"] = 1;
  CHECK(config_field([&] { parse_config(k); }) == "config.extra");
  k = minimal();
  k["evaluation"]["sweep"] = {1000, -5};
  CHECK(config_field([&] { parse_config(k); }) == "evaluation.sweep[1]");
  k = minimal();
  k.erase("algorithms");
  CHECK(config_field([&] { parse_config(k); }) == "algorithms");
}

TEST_CASE("resolved config round-trips and expands defaults") {
  auto j = minimal();
  j["algorithms"] = json::array({"mlp1", {{"name", "som"}, {"params", {{"rows", 6}}}}});
  j["evaluation"]["sweep"] = {100, 200};
  const auto cfg = parse_config(j);
  CHECK(cfg.dataset.rebalance == 0);
  CHECK(cfg.evaluation.folds == 2);
  CHECK(cfg.algorithms[1].params["rows"] == 6);
  CHECK(cfg.algorithms[1].params["cols"] == 8);
  const auto snapshot = to_json(cfg);
  CHECK(snapshot["algorithms"][0]["params"]["hidden"] == json({26}));
  CHECK(parse_config(snapshot) == cfg);
  CHECK(to_json(parse_config(snapshot)) == snapshot);
}

TEST_CASE("config files resolve dataset paths against their own directory") {
  test::TempDir dir;
  std::ofstream(dir.path() / "exp.json") << R"({
    // comments are allowed
    "dataset": {"paths": ["flows.csv"]},
    "algorithms": ["wisard"]
  })";
  const auto cfg = load_config(dir.path() / "exp.json");
  REQUIRE(cfg.dataset.paths.size() == 1);
  CHECK(cfg.dataset.paths[0] == dir.path() / "flows.csv");
  CHECK(cfg.dataset.rebalance == 20000);
  CHECK(cfg.evaluation.folds == 10);

  std::ofstream(dir.path() / "bad.json") << "{ not json";
  CHECK(config_field([&] { load_config(dir.path() / "bad.json"); }) == "config");
  CHECK_THROWS_AS(load_config(dir.path() / "missing.json"), DataError);
}

TEST_CASE("output root comes from the environment when unset") {
  ::setenv(kOutputRootVariable, "/tmp/nids-env-root", 1);
  CHECK(default_output_root() == "/tmp/nids-env-root");
  CHECK(parse_config(minimal()).output == "/tmp/nids-env-root");
  ::unsetenv(kOutputRootVariable);
  CHECK(default_output_root() == "results");
}

TEST_CASE("minimal experiment: two folds and one aggregate row") {
  const QuietLog quiet;
  test::TempDir dir;
  const auto report = run_experiment(parse_config(minimal()));
  REQUIRE(report.results.size() == 1);
  CHECK(report.results[0].cv.folds.size() == 2);
  CHECK(report.records == 1200);
  CHECK(report.classes == std::vector<std::string>{"benign", "malign"});
  const auto files = emit_report(report, dir.path());
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  const auto summary = slurp(dir.path() / "summary.csv");
  CHECK(lines(summary) == 1 + 2 + 1);
  CHECK(count(summary, "lvq1,1,") == 1);
  CHECK(count(summary, "lvq1,2,") == 1);
  CHECK(count(summary, "lvq1,mean,") == 1);
  CHECK(json::parse(slurp(dir.path() / "config.json")) == report.config);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "timing.csv"));
}

TEST_CASE("missing dataset file is a data error") {
  auto j = minimal();
  j["dataset"]["paths"] = {"/nonexistent/flows.csv"};
  CHECK_THROWS_AS(run_experiment(parse_config(j)), DataError);
}

TEST_CASE("report emission: bar groups, determinism, atomicity") {
  const QuietLog quiet;
  test::TempDir dir;
  const auto report = small_report({"lvq1", "wisard", "olvq1"});
  emit_report(report, dir.path() / "a");
  emit_report(report, dir.path() / "b");
  CHECK(count(slurp(dir.path() / "a" / "accuracy_f.svg"), "class=\"bar-group\"") == 3);
  for (const char* table : {"summary.csv", "per_class.csv", "confusion.csv", "config.json", "report.json"}) {
    CAPTURE(table);
    CHECK(slurp(dir.path() / "a" / table) == slurp(dir.path() / "b" / table));
  }

  // an independent re-run reproduces the metric tables byte for byte
  emit_report(small_report({"lvq1", "wisard", "olvq1"}), dir.path() / "c");
  CHECK(slurp(dir.path() / "a" / "summary.csv") == slurp(dir.path() / "c" / "summary.csv"));
  CHECK(slurp(dir.path() / "a" / "confusion.csv") == slurp(dir.path() / "c" / "confusion.csv"));

  // the saved report re-renders identically
  const auto reloaded = report_from_json(json::parse(slurp(dir.path() / "a" / "report.json")));
  emit_report(reloaded, dir.path() / "d");
  for (const char* f : {"summary.csv", "per_class.csv", "accuracy_f.svg", "report.json"}) {
    CAPTURE(f);
    CHECK(slurp(dir.path() / "a" / f) == slurp(dir.path() / "d" / f));
  }

  RunReport empty;
  CHECK_THROWS_AS(emit_report(empty, dir.path() / "e"), DataError);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "e"));
}

TEST_CASE("MSE history is reported for gradient-trained learners") {
  const QuietLog quiet;
  test::TempDir dir;
  auto j = minimal();
  j["algorithms"] = json::array({{{"name", "mlp1"}, {"params", {{"epochs", 12}}}}, "lvq1"});
  const auto report = run_experiment(parse_config(j));
  CHECK(report.results[0].cv.mse_history.size() == 12);
  CHECK(report.results[1].cv.mse_history.empty());
  emit_report(report, dir.path());
  CHECK(lines(slurp(dir.path() / "mse.csv")) == 1 + 12);
  CHECK(lines(slurp(dir.path() / "mse_stats.csv")) == 2);
  CHECK(polyline_vertices(slurp(dir.path() / "mse_vs_epoch.svg")) == 12);
}

TEST_CASE("size sweep emits timing tables and log-scaled plots") {
  const QuietLog quiet;
  test::TempDir dir;
  auto j = minimal();
  j["evaluation"]["sweep"] = {100, 200, 400, 800, 1200};
  const auto report = run_experiment(parse_config(j), {.cross_validate = false, .sweep = true});
  REQUIRE(report.timing.size() == 5);
  CHECK(report.results.empty());
  emit_report(report, dir.path());
  CHECK(lines(slurp(dir.path() / "timing.csv")) == 6);
  CHECK(polyline_vertices(slurp(dir.path() / "time_vs_size.svg")) == 5);
  CHECK(polyline_vertices(slurp(dir.path() / "accuracy_vs_size.svg")) == 5);

  j["evaluation"]["sweep"] = {5000};
  CHECK_THROWS_AS(run_experiment(parse_config(j), {.cross_validate = false, .sweep = true}), DataError);
}

TEST_CASE("plot_curves") {
  const Series five{"s", {1000, 2000, 5000, 10000, 20000}, {1, 2, 3, 4, 5}};
  CHECK(polyline_vertices(plot_curves({five}, PlotKind::accuracy_vs_size)) == 5);

  const Series times{"t", {1, 2, 3, 4, 5}, {1, 10, 100, 1000, 10000}};
  const auto svg = plot_curves({times}, PlotKind::time_vs_size);
  CHECK(count(svg, "class=\"tick decade\"") == 5);
  for (int k = 0; k <= 4; ++k) CHECK(count(svg, "data-exponent=\"" + std::to_string(k) + "\"") == 1);
  // equal ratios land at equal heights on a log axis
  const std::regex pt("([0-9.]+),([0-9.]+)");
  std::vector<double> ys;
  const std::regex points("points=\"([^\"]*)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, points));
  const std::string p = m[1];
  for (auto it = std::sregex_iterator(p.begin(), p.end(), pt); it != std::sregex_iterator(); ++it) {
    ys.push_back(std::stod((*it)[2]));
  }
  REQUIRE(ys.size() == 5);
  for (std::size_t i = 2; i < 5; ++i) CHECK(ys[i - 1] - ys[i] == doctest::Approx(ys[0] - ys[1]).epsilon(0.01));

  Series mse{"mse", {}, {}};
  for (int e = 1; e <= 100; ++e) {
    mse.x.push_back(e);
    mse.y.push_back(1.0 / e);
  }
  CHECK(polyline_vertices(plot_curves({mse}, PlotKind::mse_vs_epoch)) == 100);

  CHECK_THROWS_AS(plot_curves({}, PlotKind::mse_vs_epoch), std::invalid_argument);
  CHECK_THROWS_AS(plot_curves({Series{"e", {}, {}}}, PlotKind::mse_vs_epoch), std::invalid_argument);
  CHECK_THROWS_AS(plot_curves({Series{"z", {1}, {0}}}, PlotKind::time_vs_size), std::invalid_argument);
  CHECK(count(plot_curves({Series{"a<b", {1}, {1}}}, PlotKind::accuracy_vs_size), "a&lt;b") == 2);
}

TEST_CASE("saved models reproduce their predictions") {
  const QuietLog quiet;
  test::TempDir dir;
  auto data = dataset::gaussian_blobs(300, 76, 2, 1.0, 0.5, 8);
  const auto scaler = dataset::MinMaxScaler::fit(data.x);
  const auto x = scaler.apply(data.x);
  for (const auto& name : algorithm_names()) {
    CAPTURE(name);
    auto cfg = resolve_algorithm(name, "a");
    if (cfg.params.contains("epochs")) cfg.params["epochs"] = 2;
    auto learner = make_learner(cfg, 5);
    learner->fit(x, data.y, 2);
    ModelFile meta{cfg, {"benign", "malign"}, scaler, false, 5};
    save_model(dir.path() / (name + ".model"), meta, *learner);

    ModelFile back;
    const auto restored = load_model(dir.path() / (name + ".model"), back);
    CHECK(back.algorithm == cfg);
    CHECK(back.classes == meta.classes);
    CHECK(back.scaler.minimum() == scaler.minimum());
    CHECK(restored->predict(x) == learner->predict(x));
  }

  std::ofstream(dir.path() / "junk.model") << "not a model";
  ModelFile meta;
  CHECK_THROWS_AS(load_model(dir.path() / "junk.model", meta), DataError);
  const auto bytes = slurp(dir.path() / "wisard.model");
  std::ofstream(dir.path() / "cut.model", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(load_model(dir.path() / "cut.model", meta), DataError);
}

TEST_CASE("learners are deterministic in their seed") {
  const auto data = dataset::gaussian_blobs(200, 6, 2, 1.0, 1.0, 2);
  for (const auto& name : algorithm_names()) {
    CAPTURE(name);
    auto cfg = resolve_algorithm(name, "a");
    if (cfg.params.contains("epochs")) cfg.params["epochs"] = 2;
    if (cfg.params.contains("timesteps")) cfg.params["timesteps"] = 1;
    if (family_of(name) == Family::deep) continue;  // 76-input budget; covered by the deep tests
    auto a = make_learner(cfg, 3);
    auto b = make_learner(cfg, 3);
    a->fit(data.x, data.y, 2);
    b->fit(data.x, data.y, 2);
    CHECK(a->predict(data.x) == b->predict(data.x));
    CHECK(a->mse_history() == b->mse_history());
  }
}
