#include "nids/competitive/competitive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nids/common/error.hpp"
#include "nids/common/rng.hpp"
#include "nids/simd/kernels.hpp"

namespace nids::competitive {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::lvq1: return "lvq1";
    case Variant::olvq1: return "olvq1";
    case Variant::lvq2: return "lvq2";
    case Variant::lvq3: return "lvq3";
    case Variant::som: return "som";
  }
  return "?";
}

std::string_view to_string(SomSignRule r) { return r == SomSignRule::repel_winner ? "repel_winner" : "per_neuron"; }

SomSignRule parse_sign_rule(std::string_view name) {
  if (name == "repel_winner") return SomSignRule::repel_winner;
  if (name == "per_neuron") return SomSignRule::per_neuron;
  throw std::invalid_argument("unknown SOM sign rule '" + std::string(name) + "'");
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::lvq1, Variant::olvq1, Variant::lvq2, Variant::lvq3, Variant::som}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown competitive learner '" + std::string(name) + "'");
}

Codebook init_codebooks(const Matrix& x, std::span<const int> y, std::size_t count, std::uint64_t seed,
                        double initial_rate) {
  if (x.rows() != y.size()) throw std::invalid_argument("codebooks: one label per row required");
  if (count == 0) throw std::invalid_argument("codebooks: count must be positive");
  int max_label = -1;
  for (int l : y) {
    if (l < 0) throw DataError("codebooks: negative label");
    max_label = std::max(max_label, l);
  }
  const auto classes = static_cast<std::size_t>(max_label + 1);
  if (classes == 0) throw DataError("codebooks: empty training set");
  if (count < classes) throw DataError("codebooks: fewer vectors than classes");
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < y.size(); ++i) members[static_cast<std::size_t>(y[i])].push_back(i);

  Codebook cb;
  cb.prototypes = Matrix(0, x.cols());
  cb.rate_cap = initial_rate;
  Rng rng(seed);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t quota = count / classes + (c < count % classes ? 1 : 0);
    auto& m = members[c];
    if (m.empty()) throw DataError("codebooks: class " + std::to_string(c) + " has no training records");
    if (m.size() < quota) {
      throw DataError("codebooks: class " + std::to_string(c) + " has " + std::to_string(m.size()) +
                      " records, needs " + std::to_string(quota));
    }
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t k = 0; k < quota; ++k) {
      cb.prototypes.append_row(x.row(m[k]));
      cb.labels.push_back(static_cast<int>(c));
    }
  }
  cb.rates.assign(cb.labels.size(), initial_rate);
  return cb;
}

Match nearest(const Codebook& cb, std::span<const double> x) {
  if (cb.size() == 0) throw std::invalid_argument("nearest: empty codebook");
  const auto& k = simd::active();
  Match best{0, k.squared_distance(cb.prototypes.row(0).data(), x.data(), x.size())};
  for (std::size_t i = 1; i < cb.size(); ++i) {
    const double d = k.squared_distance(cb.prototypes.row(i).data(), x.data(), x.size());
    if (d < best.distance) best = {i, d};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

std::array<Match, 2> two_nearest(const Codebook& cb, std::span<const double> x) {
  if (cb.size() < 2) throw std::invalid_argument("two_nearest: need two prototypes");
  const auto& k = simd::active();
  Match first{0, std::numeric_limits<double>::infinity()};
  Match second = first;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double d = k.squared_distance(cb.prototypes.row(i).data(), x.data(), x.size());
    if (d < first.distance) {
      second = first;
      first = {i, d};
    } else if (d < second.distance) {
      second = {i, d};
    }
  }
  first.distance = std::sqrt(first.distance);
  second.distance = std::sqrt(second.distance);
  return {first, second};
}

bool in_window(double d_i, double d_j, double window) {
  const double k = (1.0 - window) / (1.0 + window);
  if (d_i == 0.0 && d_j == 0.0) return 1.0 > k;
  if (d_i == 0.0 || d_j == 0.0) return false;
  return std::min(d_i / d_j, d_j / d_i) > k;
}

std::size_t lvq1_step(Codebook& cb, std::span<const double> x, int label, double alpha) {
  const auto v = nearest(cb, x).index;
  const double rate = cb.labels[v] == label ? alpha : -alpha;
  simd::move_toward(rate, x, cb.prototypes.row(v));
  return v;
}

std::size_t olvq1_step(Codebook& cb, std::span<const double> x, int label) {
  const auto v = nearest(cb, x).index;
  const double c = cb.labels[v] == label ? 1.0 : -1.0;
  double& a = cb.rates[v];
  simd::move_toward(c * a, x, cb.prototypes.row(v));
  a = std::min(a / (1.0 + c * a), cb.rate_cap);
  return v;
}

namespace {

// Shared LVQ2/LVQ3 mixed-pair rule.
bool mixed_pair_update(Codebook& cb, std::span<const double> x, int label, double alpha, double window,
                       const std::array<Match, 2>& pair) {
  const bool first_ok = cb.labels[pair[0].index] == label;
  const bool second_ok = cb.labels[pair[1].index] == label;
  if (first_ok == second_ok) return false;
  if (!in_window(pair[0].distance, pair[1].distance, window)) return false;
  const auto right = first_ok ? pair[0].index : pair[1].index;
  const auto wrong = first_ok ? pair[1].index : pair[0].index;
  simd::move_toward(alpha, x, cb.prototypes.row(right));
  simd::move_toward(-alpha, x, cb.prototypes.row(wrong));
  return true;
}

}  // namespace

bool lvq2_step(Codebook& cb, std::span<const double> x, int label, double alpha, double window) {
  return mixed_pair_update(cb, x, label, alpha, window, two_nearest(cb, x));
}

bool lvq3_step(Codebook& cb, std::span<const double> x, int label, double alpha, double window, double epsilon) {
  const auto pair = two_nearest(cb, x);
  if (cb.labels[pair[0].index] == label && cb.labels[pair[1].index] == label) {
    if (epsilon == 0.0) return false;
    simd::move_toward(epsilon * alpha, x, cb.prototypes.row(pair[0].index));
    simd::move_toward(epsilon * alpha, x, cb.prototypes.row(pair[1].index));
    return true;
  }
  return mixed_pair_update(cb, x, label, alpha, window, pair);
}

std::vector<std::array<double, 2>> hex_lattice(std::size_t rows, std::size_t cols) {
  std::vector<std::array<double, 2>> out;
  out.reserve(rows * cols);
  const double dy = std::sqrt(3.0) / 2.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.push_back({static_cast<double>(c) + (r % 2 ? 0.5 : 0.0), static_cast<double>(r) * dy});
    }
  }
  return out;
}

namespace {

double lattice_distance2(std::array<double, 2> a, std::array<double, 2> b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace

double som_neighborhood(std::array<double, 2> winner, std::array<double, 2> other, double alpha, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("som: sigma must be positive");
  return alpha * std::exp(-lattice_distance2(winner, other) / (2.0 * sigma * sigma));
}

std::size_t som_train_step(Codebook& som, std::span<const double> x, int label, double alpha, double sigma,
                           double cutoff_sigmas, SomSignRule rule) {
  if (som.positions.size() != som.size()) throw std::invalid_argument("som: codebook has no lattice");
  const auto c = nearest(som, x).index;
  const double cutoff2 = (cutoff_sigmas * sigma) * (cutoff_sigmas * sigma);
  for (std::size_t i = 0; i < som.size(); ++i) {
    if (lattice_distance2(som.positions[c], som.positions[i]) > cutoff2) continue;
    const bool same = som.labels[i] == label;
    if (!same && rule == SomSignRule::repel_winner && i != c) continue;
    const double h = som_neighborhood(som.positions[c], som.positions[i], alpha, sigma);
    simd::move_toward(same ? h : -h, x, som.prototypes.row(i));
  }
  return c;
}

void CompetitiveConfig::validate() const {
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) throw std::invalid_argument("learning rate must lie in (0, 1)");
  if (!(window > 0.0 && window < 1.0)) throw std::invalid_argument("window must lie in (0, 1)");
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (variant == Variant::som) {
    if (som_rows * som_cols < 2) throw std::invalid_argument("SOM lattice needs at least two neurons");
    if (!(sigma_start > 0.0 && sigma_end > 0.0)) throw std::invalid_argument("SOM sigma must be positive");
  } else if (codebooks < 2) {
    throw std::invalid_argument("need at least two codebook vectors");
  }
  if (chunk == 0) throw std::invalid_argument("chunk must be positive");
}

CompetitiveModel train_competitive(const Matrix& x, std::span<const int> y, const CompetitiveConfig& cfg) {
  cfg.validate();
  CompetitiveModel model;
  model.variant = cfg.variant;
  if (cfg.variant == Variant::som) {
    auto cb = init_codebooks(x, y, cfg.som_rows * cfg.som_cols, mix_seed(cfg.seed, 1), cfg.learning_rate);
    // scatter the stratified samples over the lattice
    std::vector<std::size_t> order(cb.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng place(mix_seed(cfg.seed, 2));
    place.shuffle(std::span<std::size_t>(order));
    model.codebook.prototypes = cb.prototypes.select_rows(order);
    for (auto i : order) model.codebook.labels.push_back(cb.labels[i]);
    model.codebook.rates = cb.rates;
    model.codebook.rate_cap = cb.rate_cap;
    model.codebook.positions = hex_lattice(cfg.som_rows, cfg.som_cols);
  } else {
    model.codebook = init_codebooks(x, y, cfg.codebooks, mix_seed(cfg.seed, 1), cfg.learning_rate);
  }

  const std::size_t n = x.rows();
  const double total = static_cast<double>(cfg.epochs * n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(cfg.seed, 3));
  std::size_t t = 0;
  auto& cb = model.codebook;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += cfg.chunk) {
      const std::size_t end = std::min(n, start + cfg.chunk);
      for (std::size_t k = start; k < end; ++k, ++t) {
        const auto i = order[k];
        const double progress = static_cast<double>(t) / total;
        const double alpha = cfg.learning_rate * (1.0 - progress);
        const auto row = x.row(i);
        switch (cfg.variant) {
          case Variant::lvq1: lvq1_step(cb, row, y[i], alpha); break;
          case Variant::olvq1: olvq1_step(cb, row, y[i]); break;
          case Variant::lvq2: lvq2_step(cb, row, y[i], alpha, cfg.window); break;
          case Variant::lvq3: lvq3_step(cb, row, y[i], alpha, cfg.window, cfg.epsilon); break;
          case Variant::som: {
            const double sigma = cfg.sigma_start + (cfg.sigma_end - cfg.sigma_start) * progress;
            som_train_step(cb, row, y[i], alpha, sigma, cfg.cutoff_sigmas, cfg.sign_rule);
            break;
          }
        }
      }
    }
    for (double v : cb.prototypes.values()) {
      if (!std::isfinite(v)) {
        throw TrainingError(std::string(to_string(cfg.variant)) + " diverged: non-finite prototype after epoch " +
                            std::to_string(epoch + 1));
      }
    }
  }
  return model;
}

int CompetitiveModel::predict(std::span<const double> x) const {
  return codebook.labels[nearest(codebook, x).index];
}

std::vector<int> CompetitiveModel::predict(const Matrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

int predict_nearest(const CompetitiveModel& model, std::span<const double> x) { return model.predict(x); }

void CompetitiveModel::save(io::Writer& out) const {
  out.u8(static_cast<std::uint8_t>(variant));
  out.u64(codebook.prototypes.rows());
  out.u64(codebook.prototypes.cols());
  out.f64s(codebook.prototypes.values());
  out.u64(codebook.labels.size());
  for (int l : codebook.labels) out.u64(static_cast<std::uint64_t>(l));
  out.f64s(codebook.rates);
  out.f64(codebook.rate_cap);
  out.u64(codebook.positions.size());
  for (const auto& p : codebook.positions) {
    out.f64(p[0]);
    out.f64(p[1]);
  }
}

CompetitiveModel CompetitiveModel::load(io::Reader& in) {
  CompetitiveModel m;
  const auto v = in.u8();
  if (v > static_cast<std::uint8_t>(Variant::som)) throw DataError("model file corrupt: learner tag");
  m.variant = static_cast<Variant>(v);
  const auto rows = in.u64();
  const auto cols = in.u64();
  const auto values = in.f64s();
  if (values.size() != rows * cols) throw DataError("model file corrupt: prototype matrix");
  m.codebook.prototypes = Matrix(rows, cols);
  std::copy(values.begin(), values.end(), m.codebook.prototypes.values().begin());
  const auto labels = in.u64();
  if (labels != rows) throw DataError("model file corrupt: label count");
  for (std::uint64_t i = 0; i < labels; ++i) m.codebook.labels.push_back(static_cast<int>(in.u64()));
  m.codebook.rates = in.f64s();
  m.codebook.rate_cap = in.f64();
  const auto positions = in.u64();
  if (positions != 0 && positions != rows) throw DataError("model file corrupt: lattice size");
  for (std::uint64_t i = 0; i < positions; ++i) {
    const double a = in.f64();
    const double b = in.f64();
    m.codebook.positions.push_back({a, b});
  }
  return m;
}

}  // namespace nids::competitive
