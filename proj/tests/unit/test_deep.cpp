#include <cmath>
#include <vector>

#include "doctest.h"
#include "nids/dataset/synthetic.hpp"
#include "nids/deep/model.hpp"

using namespace nids;
using namespace nids::deep;

namespace {

double sigm(double v) { return 1 / (1 + std::exp(-v)); }

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

double relative_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

// Textbook cell equations written out element by element; the oracle for
// both the step functions and the finite-difference checks.
struct NaiveCell {
  const RecurrentSpec& s;
  const std::vector<double>& p;

  double wx(std::size_t row, std::size_t col) const { return p[s.wx_offset() + row * s.inputs + col]; }
  double wh(std::size_t row, std::size_t col) const { return p[s.wh_offset() + row * s.units + col]; }
  double b(std::size_t row) const { return p[s.bias_offset() + row]; }

  double pre(std::size_t row, const std::vector<double>& x, const std::vector<double>& h) const {
    double a = b(row);
    for (std::size_t j = 0; j < s.inputs; ++j) a += wx(row, j) * x[j];
    for (std::size_t j = 0; j < s.units; ++j) a += wh(row, j) * h[j];
    return a;
  }

  // returns final h after running `seq` (steps x inputs) from zero state
  std::vector<double> run(const std::vector<double>& seq, std::size_t steps) const {
    const auto H = s.units;
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      std::vector<double> x(seq.begin() + static_cast<long>(t * s.inputs),
                            seq.begin() + static_cast<long>((t + 1) * s.inputs));
      std::vector<double> hn(H);
      for (std::size_t i = 0; i < H; ++i) {
        if (s.kind == CellKind::rnn) {
          hn[i] = std::tanh(pre(i, x, h));
        } else if (s.kind == CellKind::lstm) {
          const double in = sigm(pre(i, x, h)), f = sigm(pre(H + i, x, h));
          const double g = std::tanh(pre(2 * H + i, x, h)), o = sigm(pre(3 * H + i, x, h));
          c[i] = f * c[i] + in * g;
          hn[i] = o * std::tanh(c[i]);
        } else {
          const double z = sigm(pre(i, x, h));
          std::vector<double> rh(H);
          for (std::size_t j = 0; j < H; ++j) rh[j] = sigm(pre(H + j, x, h)) * h[j];
          double a = b(2 * H + i);
          for (std::size_t j = 0; j < s.inputs; ++j) a += wx(2 * H + i, j) * x[j];
          for (std::size_t j = 0; j < H; ++j) a += wh(2 * H + i, j) * rh[j];
          hn[i] = (1 - z) * h[i] + z * std::tanh(a);
        }
      }
      h = hn;
    }
    return h;
  }
};

double cell_fd_error(CellKind kind, std::size_t units, std::size_t inputs, std::uint64_t seed) {
  Rng rng(seed);
  RecurrentSpec spec{kind, units, inputs};
  std::vector<double> p = random_vector(rng, spec.parameter_count());
  const std::size_t steps = 3;
  const auto seq = random_vector(rng, steps * inputs);
  const auto weights = random_vector(rng, units);  // L = weights . h_T
  auto loss = [&](const std::vector<double>& q) {
    const auto h = NaiveCell{spec, q}.run(seq, steps);
    double l = 0;
    for (std::size_t i = 0; i < units; ++i) l += weights[i] * h[i];
    return l;
  };
  SequenceTrace trace;
  trace.forward(spec, p, seq, steps);
  std::vector<double> grad(p.size(), 0.0), dx(seq.size());
  trace.backward(spec, p, weights, grad, dx);
  double worst = 0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto up = p, down = p;
    up[i] += h;
    down[i] -= h;
    worst = std::max(worst, relative_error(grad[i], (loss(up) - loss(down)) / (2 * h)));
  }
  // input gradient through the same oracle
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto su = seq, sd = seq;
    su[i] += h;
    sd[i] -= h;
    auto eval = [&](const std::vector<double>& sq) {
      const auto hT = NaiveCell{spec, p}.run(sq, steps);
      double l = 0;
      for (std::size_t k = 0; k < units; ++k) l += weights[k] * hT[k];
      return l;
    };
    worst = std::max(worst, relative_error(dx[i], (eval(su) - eval(sd)) / (2 * h)));
  }
  return worst;
}

double model_fd_error(const DeepModel& model, const Matrix& x, const std::vector<int>& y) {
  auto ws = model.make_workspace();
  Rng rng(1);
  std::vector<double> grad(model.parameter_count(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    model.accumulate_gradient(x.row(r), static_cast<std::size_t>(y[r]), mlp::Loss::least_squares, grad, ws, rng);
  }
  auto total = [&](const DeepModel& m) {
    auto w = m.make_workspace();
    double e = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto s = m.scores(x.row(r), w);
      for (std::size_t c = 0; c < s.size(); ++c) {
        const double t = static_cast<int>(c) == y[r] ? 1.0 : 0.0;
        e += (t - s[c]) * (t - s[c]);
      }
    }
    return e;
  };
  double worst = 0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < model.parameter_count(); ++i) {
    auto up = model, down = model;
    up.parameters()[i] += h;
    down.parameters()[i] -= h;
    worst = std::max(worst, relative_error(grad[i], (total(up) - total(down)) / (2 * h)));
  }
  return worst;
}

}  // namespace

TEST_CASE("conv1d examples") {
  ConvSpec spec{1, 4};
  const std::vector<double> shift{1, 0, 0, 0}, zero_bias{0};
  const std::vector<double> x{3, -1, 4, 1, 5, 9, 2};
  const auto out = conv1d_forward(spec, shift, zero_bias, x);
  REQUIRE(out.cols() == 4);
  for (std::size_t p = 0; p < 4; ++p) CHECK(out(0, p) == x[p]);

  const std::vector<double> ones{1, 1, 1, 1}, four{1, 1, 1, 1};
  CHECK(conv1d_forward(spec, ones, zero_bias, four)(0, 0) == 4.0);
  CHECK_THROWS_AS(conv1d_forward(spec, ones, zero_bias, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("conv1d equals the nested-loop oracle (property)") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    ConvSpec spec{1 + rng.below(8), 1 + rng.below(6)};
    const auto x = random_vector(rng, spec.kernel + rng.below(80), 5.0);
    const auto w = random_vector(rng, spec.filters * spec.kernel);
    const auto b = random_vector(rng, spec.filters);
    const auto out = conv1d_forward(spec, w, b, x);
    for (std::size_t f = 0; f < spec.filters; ++f) {
      for (std::size_t p = 0; p + spec.kernel <= x.size(); ++p) {
        double acc = b[f];
        for (std::size_t k = 0; k < spec.kernel; ++k) acc += w[f * spec.kernel + k] * x[p + k];
        CHECK(std::abs(out(f, p) - acc) <= 1e-12);
      }
    }
  }
}

TEST_CASE("maxpool1d") {
  CHECK(maxpool1d(std::vector<double>{1, 3, 2, 0}, 2) == std::vector<double>{3, 2});
  CHECK(maxpool1d(std::vector<double>{5}, 2).empty());
  CHECK(maxpool1d(std::vector<double>{1, 2, 3, 4, 5, 6, 7}, 2) == std::vector<double>{2, 4, 6});
  std::vector<std::size_t> winners;
  maxpool1d(std::vector<double>{1, 2, 3, 4, 5, 6}, 3, &winners);
  CHECK(winners == std::vector<std::size_t>{2, 5});
  CHECK_THROWS_AS(maxpool1d(std::vector<double>{}, 2), std::invalid_argument);
}

TEST_CASE("dropout") {
  Rng rng(4);
  std::vector<double> x{1, 2, 3};
  dropout_apply(x, 0.0, rng, true);
  CHECK(x == std::vector<double>{1, 2, 3});
  dropout_apply(x, 0.9, rng, false);
  CHECK(x == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(dropout_apply(x, 1.0, rng, true), std::invalid_argument);

  std::vector<double> big(100000, 1.0);
  dropout_apply(big, 0.3, rng, true);
  std::size_t zeros = 0;
  double sum = 0;
  for (double v : big) {
    zeros += v == 0.0;
    sum += v;
  }
  CHECK(std::abs(static_cast<double>(zeros) / 1e5 - 0.3) <= 0.01);
  CHECK(std::abs(sum / 1e5 - 1.0) <= 0.01);  // expectation preserved
}

TEST_CASE("RNN cell") {
  RecurrentSpec spec{CellKind::rnn, 3, 2};
  std::vector<double> p(spec.parameter_count(), 0.0);
  p[spec.bias_offset()] = 0.5;
  p[spec.bias_offset() + 2] = -2;
  const auto h = rnn_cell_step(spec, p, std::vector<double>{0.3, 0.2, 0.1}, std::vector<double>{7, 8});
  CHECK(h[0] == std::tanh(0.5));
  CHECK(h[1] == 0.0);
  CHECK(h[2] == std::tanh(-2.0));

  // W_x = 0, W_h = 0.5 I: the state decays toward the fixed point and stays inside (-1, 1)
  std::fill(p.begin(), p.end(), 0.0);
  for (std::size_t i = 0; i < 3; ++i) p[spec.wh_offset() + i * 3 + i] = 0.5;
  std::vector<double> state{0.9, -0.9, 0.5};
  for (int t = 0; t < 50; ++t) {
    const auto next = rnn_cell_step(spec, p, state, std::vector<double>{1, 1});
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(next[i]) < 1.0);
      CHECK(std::abs(next[i]) <= std::abs(state[i]));
    }
    state = next;
  }
  CHECK(std::abs(state[0]) < 1e-12);
}

TEST_CASE("LSTM gate identities") {
  RecurrentSpec spec{CellKind::lstm, 3, 2};
  Rng rng(6);
  auto p = random_vector(rng, spec.parameter_count());
  const auto hp = random_vector(rng, 3), cp = random_vector(rng, 3, 4.0), x = random_vector(rng, 2);
  const std::size_t H = 3;

  auto closed = p;
  for (std::size_t i = 0; i < H; ++i) closed[spec.bias_offset() + 3 * H + i] = -1e300;  // output gate 0
  const auto s = lstm_cell_step(spec, closed, hp, cp, x);
  for (double v : s.h) CHECK(v == 0.0);

  auto carry = p;
  for (std::size_t i = 0; i < H; ++i) {
    carry[spec.bias_offset() + i] = -1e300;     // input gate 0
    carry[spec.bias_offset() + H + i] = 1e300;  // forget gate 1
  }
  CHECK(lstm_cell_step(spec, carry, hp, cp, x).c == cp);
}

TEST_CASE("GRU interpolation endpoints") {
  RecurrentSpec spec{CellKind::gru, 4, 3};
  Rng rng(8);
  auto p = random_vector(rng, spec.parameter_count());
  const auto hp = random_vector(rng, 4), x = random_vector(rng, 3);

  auto hold = p;
  for (std::size_t i = 0; i < 4; ++i) hold[spec.bias_offset() + i] = -1e300;  // z = 0
  CHECK(gru_cell_step(spec, hold, hp, x) == hp);

  // z = 1 and a candidate whose weights are zero: h = tanh(b_n) exactly
  auto take = p;
  for (std::size_t i = 0; i < 4; ++i) {
    take[spec.bias_offset() + i] = 1e300;
    for (std::size_t j = 0; j < 3; ++j) take[spec.wx_offset() + (8 + i) * 3 + j] = 0.0;
    for (std::size_t j = 0; j < 4; ++j) take[spec.wh_offset() + (8 + i) * 4 + j] = 0.0;
  }
  const auto h = gru_cell_step(spec, take, hp, x);
  for (std::size_t i = 0; i < 4; ++i) CHECK(h[i] == std::tanh(take[spec.bias_offset() + 8 + i]));

  // z = 1 with general weights agrees with the oracle candidate
  auto general = p;
  for (std::size_t i = 0; i < 4; ++i) general[spec.bias_offset() + i] = 1e300;
  const auto hg = gru_cell_step(spec, general, hp, x);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> rh(4);
    for (std::size_t j = 0; j < 4; ++j) {
      double a = general[spec.bias_offset() + 4 + j];
      for (std::size_t k = 0; k < 3; ++k) a += general[spec.wx_offset() + (4 + j) * 3 + k] * x[k];
      for (std::size_t k = 0; k < 4; ++k) a += general[spec.wh_offset() + (4 + j) * 4 + k] * hp[k];
      rh[j] = sigm(a) * hp[j];
    }
    double a = general[spec.bias_offset() + 8 + i];
    for (std::size_t k = 0; k < 3; ++k) a += general[spec.wx_offset() + (8 + i) * 3 + k] * x[k];
    for (std::size_t k = 0; k < 4; ++k) a += general[spec.wh_offset() + (8 + i) * 4 + k] * rh[k];
    CHECK(std::abs(hg[i] - std::tanh(a)) <= 1e-12);
  }
}

TEST_CASE("cell steps agree with the textbook equations (property)") {
  Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const auto kind = static_cast<CellKind>(trial % 3);
    RecurrentSpec spec{kind, 1 + rng.below(5), 1 + rng.below(5)};
    const auto p = random_vector(rng, spec.parameter_count());
    const auto steps = 1 + rng.below(5);
    const auto seq = random_vector(rng, steps * spec.inputs, 2.0);
    SequenceTrace trace;
    const auto h = trace.forward(spec, p, seq, steps);
    const auto ref = NaiveCell{spec, p}.run(seq, steps);
    for (std::size_t i = 0; i < spec.units; ++i) CHECK(std::abs(h[i] - ref[i]) <= 1e-12);
  }
}

TEST_CASE("unrolled 3-step gradients match finite differences") {
  CHECK(cell_fd_error(CellKind::rnn, 3, 2, 1) <= 1e-4);
  CHECK(cell_fd_error(CellKind::lstm, 3, 2, 2) <= 1e-4);
  CHECK(cell_fd_error(CellKind::gru, 3, 2, 3) <= 1e-4);
}

TEST_CASE("cell gradients on random small cells (property)") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto kind = static_cast<CellKind>(trial % 3);
    const std::size_t units = 1 + rng.below(3), inputs = 1 + rng.below(3);
    if (RecurrentSpec{kind, units, inputs}.parameter_count() > 100) continue;
    CHECK(cell_fd_error(kind, units, inputs, rng.next()) <= 1e-4);
  }
}

TEST_CASE("whole-model gradients match finite differences") {
  Rng rng(5);
  Matrix x(3, 12);
  for (auto& v : x.values()) v = rng.uniform(0, 1);
  const std::vector<int> y{0, 1, 1};

  DeepArchitecture cnn;
  cnn.kind = DeepKind::cnn;
  cnn.inputs = 12;
  cnn.conv = {2, 3};
  cnn.dropout = 0.0;
  cnn.head_hidden = {3};
  CHECK(model_fd_error(DeepModel(cnn, 1), x, y) <= 1e-4);

  for (auto kind : {DeepKind::rnn, DeepKind::lstm, DeepKind::gru}) {
    DeepArchitecture a;
    a.kind = kind;
    a.inputs = 12;
    a.units = 2;
    a.timesteps = 4;
    a.head_hidden = {3};
    REQUIRE(a.parameter_count() <= 100);
    CAPTURE(to_string(kind));
    CHECK(model_fd_error(DeepModel(a, 2), x, y) <= 1e-4);
  }
}

TEST_CASE("reference structures stay inside the weight budget") {
  for (auto kind : {DeepKind::cnn, DeepKind::rnn, DeepKind::lstm, DeepKind::gru}) {
    for (std::size_t classes : {2, 4}) {
      const auto a = reference_architecture(kind, 76, classes);
      CAPTURE(to_string(kind));
      CHECK(a.parameter_count() >= kMinWeightBudget);
      CHECK(a.parameter_count() <= kMaxWeightBudget);
      CHECK_NOTHROW(check_weight_budget(a));
      CHECK(DeepModel(a, 1).parameter_count() == a.parameter_count());
    }
  }
  CHECK(reference_architecture(DeepKind::cnn, 76, 2).parameter_count() == 35 + 252 * 8 + 8 + 8 * 2 + 2);
  CHECK(reference_architecture(DeepKind::lstm, 76, 2).parameter_count() == 4 * 6 * (76 + 6 + 1) + 6 * 8 + 8 + 18);

  auto univariate = reference_architecture(DeepKind::rnn, 76, 2);
  univariate.timesteps = 76;
  CHECK_THROWS_AS(check_weight_budget(univariate), std::invalid_argument);
}

TEST_CASE("deep models learn separable synthetic data") {
  auto data = dataset::gaussian_blobs(300, 76, 2, 1.0, 0.25, 3);
  mlp::TrainConfig cfg;
  cfg.epochs = 100;
  cfg.batch_size = 50;
  cfg.optimizer.learning_rate = 0.005;
  for (auto kind : {DeepKind::cnn, DeepKind::rnn, DeepKind::lstm, DeepKind::gru}) {
    DeepModel m(reference_architecture(kind, 76, 2), 11);
    const auto h = train_deep(m, data.x, data.y, cfg);
    const auto pred = mlp::predict_classes(m, data.x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.y[i];
    CAPTURE(to_string(kind));
    CHECK(h.size() == 100);
    CHECK(static_cast<double>(hits) / static_cast<double>(pred.size()) >= 0.95);
  }
}

TEST_CASE("deep training edge cases, determinism and persistence") {
  auto data = dataset::gaussian_blobs(60, 76, 2, 1.0, 0.3, 4);
  const DeepModel initial(reference_architecture(DeepKind::gru, 76, 2), 3);
  mlp::TrainConfig cfg;
  cfg.epochs = 0;
  auto m = initial;
  CHECK(train_deep(m, data.x, data.y, cfg).size() == 0);
  CHECK(m == initial);

  cfg.epochs = 3;
  auto a = initial, b = initial;
  train_deep(a, data.x, data.y, cfg);
  train_deep(b, data.x, data.y, cfg);
  CHECK(a == b);

  auto cnn = DeepModel(reference_architecture(DeepKind::cnn, 76, 2), 3);
  auto cnn2 = cnn;
  train_deep(cnn, data.x, data.y, cfg);
  train_deep(cnn2, data.x, data.y, cfg);
  CHECK(cnn == cnn2);

  io::Writer w;
  cnn.save(w);
  io::Reader r(w.bytes());
  CHECK(DeepModel::load(r) == cnn);
}
