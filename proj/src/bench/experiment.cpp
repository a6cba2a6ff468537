#include "nids/bench/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "nids/bench/plot.hpp"
#include "nids/common/error.hpp"
#include "nids/common/log.hpp"
#include "nids/common/rng.hpp"
#include "nids/io/binary.hpp"
#include "nids/simd/kernels.hpp"

namespace nids::bench {

using nlohmann::json;

namespace {

constexpr const char* kModelKind = "nids-model";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

double macro_f(const eval::Metrics& m) {
  double sum = 0;
  for (const auto& c : m.per_class) sum += c.f_measure;
  return m.per_class.empty() ? 0.0 : sum / static_cast<double>(m.per_class.size());
}

json cm_to_json(const eval::ConfusionMatrix& cm) {
  json rows = json::array();
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < cm.classes(); ++p) row.push_back(cm(t, p));
    rows.push_back(row);
  }
  return rows;
}

eval::ConfusionMatrix cm_from_json(const json& rows) {
  eval::ConfusionMatrix cm(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != rows.size()) throw DataError("report: confusion matrix is not square");
    for (std::size_t p = 0; p < rows.size(); ++p) cm.add(t, p, rows[t][p].get<std::uint64_t>());
  }
  return cm;
}

}  // namespace

HostInfo host_info() {
  HostInfo h;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) h.cpu = line.substr(colon + 2);
      break;
    }
  }
  if (h.cpu.empty()) h.cpu = "unknown";
  h.kernels = std::string(simd::active().name);
  h.threads = std::thread::hardware_concurrency();
#if defined(__clang__)
  h.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  h.compiler = "gcc " __VERSION__;
#else
  h.compiler = "unknown";
#endif
  return h;
}

dataset::FlowDataset prepare_dataset(const DatasetConfig& cfg, std::uint64_t seed) {
  if (cfg.paths.empty()) throw DataError("no dataset files given");
  dataset::LoadOptions opts;
  opts.label_column = cfg.label_column;
  opts.allow_missing_columns = cfg.allow_missing_columns;
  if (!cfg.aliases.empty()) opts.aliases = dataset::load_aliases(cfg.aliases);

  std::vector<dataset::FlowDataset> parts;
  for (const auto& p : cfg.paths) {
    parts.push_back(dataset::load_flow_csv(p, dataset::flow_schema(), opts));
    log::info("loaded " + std::to_string(parts.back().size()) + " flows from " + p.string());
  }
  auto ds = parts.size() == 1 ? std::move(parts.front()) : dataset::concat(parts);
  if (cfg.clean) {
    const auto before = ds.size();
    ds = dataset::clean(ds);
    log::info("cleaning kept " + std::to_string(ds.size()) + " of " + std::to_string(before) + " flows");
  }
  ds = dataset::encode_labels(ds, cfg.label_mode);
  if (cfg.rebalance > 0) ds = dataset::rebalance(ds, cfg.rebalance, mix_seed(seed, 7));
  return ds;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  RunReport r;
  r.config = to_json(cfg);
  r.host = host_info();
  const auto ds = prepare_dataset(cfg.dataset, cfg.evaluation.seed);
  const auto problem = eval::make_problem(ds, {cfg.dataset.include_addresses});
  r.classes = problem.classes;
  r.records = problem.x.rows();

  for (const auto& algo : cfg.algorithms) {
    const auto factory = make_factory(algo);
    if (options.cross_validate) {
      log::info("cross-validating " + display_name(algo.name) + " (" + std::to_string(cfg.evaluation.folds) +
                " folds, " + std::to_string(r.records) + " records)");
      AlgorithmResult res{algo.name, eval::cross_validate(factory, problem, cfg.evaluation.folds, cfg.evaluation.seed)};
      if (!res.cv.leak_free()) throw std::logic_error("scaler was fitted outside the training split");
      if (!cfg.evaluation.track_mse) {
        res.cv.mse_history.clear();
        for (auto& f : res.cv.folds) f.mse_history.clear();
      }
      r.results.push_back(std::move(res));
    }
    if (options.sweep && !cfg.evaluation.sweep.empty()) {
      auto t = eval::benchmark_time(factory, problem, cfg.evaluation.sweep, cfg.evaluation.seed);
      r.timing.insert(r.timing.end(), t.begin(), t.end());
    }
  }
  return r;
}

json to_json(const RunReport& r) {
  json results = json::array();
  for (const auto& res : r.results) {
    json folds = json::array();
    for (const auto& f : res.cv.folds) {
      folds.push_back({{"confusion", cm_to_json(f.confusion)},
                       {"mse_history", f.mse_history},
                       {"train_rows", f.train_rows},
                       {"test_rows", f.test_rows},
                       {"scaler_rows", f.scaler_rows}});
    }
    results.push_back({{"algorithm", res.name}, {"folds", folds}, {"mse_history", res.cv.mse_history}});
  }
  json timing = json::array();
  for (const auto& t : r.timing) {
    timing.push_back({{"algorithm", t.algorithm},
                      {"size", t.size},
                      {"seconds", t.seconds},
                      {"average_accuracy", t.average_accuracy}});
  }
  return {{"config", r.config},
          {"classes", r.classes},
          {"records", r.records},
          {"results", results},
          {"timing", timing},
          {"host",
           {{"cpu", r.host.cpu}, {"kernels", r.host.kernels}, {"threads", r.host.threads}, {"compiler", r.host.compiler}}}};
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    r.config = j.at("config");
    r.classes = j.at("classes").get<std::vector<std::string>>();
    r.records = j.at("records").get<std::size_t>();
    for (const auto& res : j.at("results")) {
      AlgorithmResult a;
      a.name = res.at("algorithm").get<std::string>();
      std::vector<eval::Metrics> per_fold;
      for (const auto& f : res.at("folds")) {
        eval::FoldResult fr;
        fr.confusion = cm_from_json(f.at("confusion"));
        fr.metrics = eval::evaluate(fr.confusion);
        fr.mse_history = f.at("mse_history").get<std::vector<double>>();
        fr.train_rows = f.at("train_rows").get<std::size_t>();
        fr.test_rows = f.at("test_rows").get<std::size_t>();
        fr.scaler_rows = f.at("scaler_rows").get<std::size_t>();
        per_fold.push_back(fr.metrics);
        a.cv.folds.push_back(std::move(fr));
      }
      a.cv.mean = eval::mean_metrics(per_fold);
      a.cv.mse_history = res.at("mse_history").get<std::vector<double>>();
      r.results.push_back(std::move(a));
    }
    for (const auto& t : j.at("timing")) {
      r.timing.push_back({t.at("algorithm").get<std::string>(), t.at("size").get<std::size_t>(),
                          t.at("seconds").get<double>(), t.at("average_accuracy").get<double>()});
    }
    const auto& h = j.at("host");
    r.host = {h.at("cpu").get<std::string>(), h.at("kernels").get<std::string>(), h.at("threads").get<unsigned>(),
              h.at("compiler").get<std::string>()};
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& out_dir) {
  if (r.results.empty() && r.timing.empty()) throw DataError("report holds no metrics and no timings");
  for (const auto& res : r.results) {
    if (res.cv.folds.empty()) throw DataError("report: " + res.name + " has no folds");
  }

  // Everything is rendered first so a failure leaves the directory untouched.
  std::map<std::string, std::string> files;
  files["config.json"] = r.config.dump(2) + "\n";
  files["report.json"] = to_json(r).dump(1) + "\n";

  if (!r.results.empty()) {
    std::string summary = "algorithm,fold,accuracy,average_accuracy,macro_f_measure\n";
    std::string per_class = "algorithm,fold,class,accuracy,precision,recall,f_measure,degenerate\n";
    std::string confusion = "algorithm,fold,truth,predicted,count\n";
    auto class_rows = [&](const std::string& algo, const std::string& fold, const eval::Metrics& m) {
      for (std::size_t c = 0; c < m.per_class.size(); ++c) {
        const auto& s = m.per_class[c];
        per_class += algo + "," + fold + "," + csv_field(r.classes.at(c)) + "," + fmt(s.accuracy) + "," +
                     fmt(s.precision) + "," + fmt(s.recall) + "," + fmt(s.f_measure) + "," +
                     (s.degenerate ? "1" : "0") + "\n";
      }
    };
    std::vector<BarGroup> bars;
    std::vector<Series> mse;
    std::string mse_csv = "algorithm,epoch,mse\n";
    std::string mse_stats = "algorithm,median,iqr\n";
    for (const auto& res : r.results) {
      for (std::size_t f = 0; f < res.cv.folds.size(); ++f) {
        const auto& fr = res.cv.folds[f];
        const auto fold = std::to_string(f + 1);
        summary += res.name + "," + fold + "," + fmt(fr.metrics.accuracy) + "," + fmt(fr.metrics.average_accuracy) +
                   "," + fmt(macro_f(fr.metrics)) + "\n";
        class_rows(res.name, fold, fr.metrics);
        for (std::size_t t = 0; t < fr.confusion.classes(); ++t) {
          for (std::size_t p = 0; p < fr.confusion.classes(); ++p) {
            confusion += res.name + "," + fold + "," + csv_field(r.classes.at(t)) + "," + csv_field(r.classes.at(p)) +
                         "," + std::to_string(fr.confusion(t, p)) + "\n";
          }
        }
      }
      summary += res.name + ",mean," + fmt(res.cv.mean.accuracy) + "," + fmt(res.cv.mean.average_accuracy) + "," +
                 fmt(macro_f(res.cv.mean)) + "\n";
      class_rows(res.name, "mean", res.cv.mean);
      bars.push_back({display_name(res.name), {res.cv.mean.accuracy, macro_f(res.cv.mean)}});

      if (!res.cv.mse_history.empty()) {
        Series s{display_name(res.name), {}, res.cv.mse_history};
        for (std::size_t e = 0; e < res.cv.mse_history.size(); ++e) {
          s.x.push_back(static_cast<double>(e + 1));
          mse_csv += res.name + "," + std::to_string(e + 1) + "," + fmt(res.cv.mse_history[e]) + "\n";
        }
        const auto st = eval::mse_stats(res.cv.mse_history);
        mse_stats += res.name + "," + fmt(st.median) + "," + fmt(st.iqr) + "\n";
        mse.push_back(std::move(s));
      }
    }
    files["summary.csv"] = summary;
    files["per_class.csv"] = per_class;
    files["confusion.csv"] = confusion;
    files["accuracy_f.svg"] = plot_bars(bars, {"accuracy", "F-measure"}, "Cross-validated accuracy and F-measure");
    if (!mse.empty()) {
      files["mse.csv"] = mse_csv;
      files["mse_stats.csv"] = mse_stats;
      files["mse_vs_epoch.svg"] = plot_curves(mse, PlotKind::mse_vs_epoch);
    }
  }

  if (!r.timing.empty()) {
    std::string timing = "algorithm,size,seconds,average_accuracy\n";
    std::vector<std::string> order;
    std::map<std::string, Series> acc, secs;
    for (const auto& t : r.timing) {
      timing += t.algorithm + "," + std::to_string(t.size) + "," + fmt(t.seconds) + "," + fmt(t.average_accuracy) + "\n";
      if (!acc.contains(t.algorithm)) {
        order.push_back(t.algorithm);
        acc[t.algorithm].name = secs[t.algorithm].name = display_name(t.algorithm);
      }
      acc[t.algorithm].x.push_back(static_cast<double>(t.size));
      acc[t.algorithm].y.push_back(t.average_accuracy);
      secs[t.algorithm].x.push_back(static_cast<double>(t.size));
      secs[t.algorithm].y.push_back(t.seconds);
    }
    std::vector<Series> a, s;
    for (const auto& name : order) {
      a.push_back(acc[name]);
      s.push_back(secs[name]);
    }
    files["timing.csv"] = timing;
    files["accuracy_vs_size.svg"] = plot_curves(a, PlotKind::accuracy_vs_size);
    files["time_vs_size.svg"] = plot_curves(s, PlotKind::time_vs_size);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    io::write_file_atomic(out_dir / name, content);
    written.push_back(out_dir / name);
  }
  return written;
}

void save_model(const std::filesystem::path& path, const ModelFile& meta, const Learner& learner) {
  io::Writer w;
  w.str(meta.algorithm.name);
  w.str(meta.algorithm.params.dump());
  w.strs(meta.classes);
  w.f64s(meta.scaler.minimum());
  w.f64s(meta.scaler.maximum());
  w.u8(meta.include_addresses ? 1 : 0);
  w.u64(meta.seed);
  learner.save(w);
  io::save_container(path, kModelKind, w);
}

std::unique_ptr<Learner> load_model(const std::filesystem::path& path, ModelFile& meta) {
  std::string kind;
  auto r = io::open_container(path, kind);
  if (kind != kModelKind) throw DataError(path.string() + " holds a '" + kind + "', not a trained model");
  meta.algorithm.name = r.str();
  if (!is_algorithm(meta.algorithm.name)) throw DataError("model file names unknown algorithm " + meta.algorithm.name);
  try {
    meta.algorithm.params = json::parse(r.str());
  } catch (const json::exception&) {
    throw DataError("model file carries malformed parameters");
  }
  meta.classes = r.strs();
  auto lo = r.f64s();
  auto hi = r.f64s();
  try {
    meta.scaler = dataset::MinMaxScaler(std::move(lo), std::move(hi));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file scaler: ") + e.what());
  }
  meta.include_addresses = r.u8() != 0;
  meta.seed = r.u64();
  auto learner = make_learner(meta.algorithm, meta.seed);
  learner->load(r);
  if (!r.at_end()) throw DataError("model file has trailing bytes");
  return learner;
}

}  // namespace nids::bench
