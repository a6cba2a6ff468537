#include <cmath>
#include <vector>

#include "doctest.h"
#include "nids/common/error.hpp"
#include "nids/common/rng.hpp"
#include "nids/competitive/competitive.hpp"
#include "nids/dataset/synthetic.hpp"

using namespace nids;
using namespace nids::competitive;

namespace {

Codebook make(std::vector<std::vector<double>> rows, std::vector<int> labels) {
  Codebook cb;
  for (const auto& r : rows) cb.prototypes.append_row(r);
  cb.labels = std::move(labels);
  cb.rates.assign(cb.labels.size(), 0.3);
  return cb;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::size_t scan_nearest(const Codebook& cb, std::span<const double> x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cb.size(); ++i) {
    if (dist(cb.prototypes.row(i), x) < dist(cb.prototypes.row(best), x)) best = i;
  }
  return best;
}

Codebook random_codebook(Rng& rng, std::size_t n, std::size_t dim, int classes) {
  Codebook cb;
  cb.prototypes = Matrix(n, dim);
  for (auto& v : cb.prototypes.values()) v = rng.uniform();
  for (std::size_t i = 0; i < n; ++i) cb.labels.push_back(static_cast<int>(i % static_cast<std::size_t>(classes)));
  cb.rates.assign(n, 0.3);
  return cb;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hits += a[i] == b[i];
  return static_cast<double>(hits) / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("class-stratified codebook initialisation") {
  const auto two = dataset::gaussian_blobs(200, 3, 2, 5.0, 1.0, 1);
  const auto cb = init_codebooks(two.x, two.y, 20, 4);
  CHECK(std::count(cb.labels.begin(), cb.labels.end(), 0) == 10);
  CHECK(std::count(cb.labels.begin(), cb.labels.end(), 1) == 10);
  CHECK(init_codebooks(two.x, two.y, 20, 4) == cb);
  CHECK_FALSE(init_codebooks(two.x, two.y, 20, 5) == cb);
  // every prototype is a training row of its own class
  for (std::size_t i = 0; i < cb.size(); ++i) {
    bool found = false;
    for (std::size_t r = 0; r < two.x.rows(); ++r) {
      found = found || (two.y[r] == cb.labels[i] && dist(two.x.row(r), cb.prototypes.row(i)) == 0.0);
    }
    CHECK(found);
  }

  const auto four = dataset::gaussian_blobs(200, 3, 4, 5.0, 1.0, 2);
  const auto cb4 = init_codebooks(four.x, four.y, 20, 4);
  for (int c = 0; c < 4; ++c) CHECK(std::count(cb4.labels.begin(), cb4.labels.end(), c) == 5);

  std::vector<int> gap{0, 0, 2, 2};
  CHECK_THROWS_AS(init_codebooks(Matrix(4, 2), gap, 3, 1), DataError);
}

TEST_CASE("nearest and two_nearest") {
  auto cb = make({{0, 0}, {1, 0}, {0, 1}, {5, 5}}, {0, 1, 0, 1});
  const std::vector<double> at3{5, 5};
  CHECK(nearest(cb, at3).index == 3);
  CHECK(nearest(cb, at3).distance == 0.0);
  const std::vector<double> mid{0.5, 0.5};
  CHECK(nearest(cb, mid).index == 0);
  const auto pair = two_nearest(cb, mid);
  CHECK(pair[0].index == 0);
  CHECK(pair[1].index == 1);
}

TEST_CASE("nearest agrees with a linear scan (property)") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cb = random_codebook(rng, 20, 6, 3);
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform();
    CHECK(nearest(cb, x).index == scan_nearest(cb, x));
    CompetitiveModel m{Variant::lvq1, cb};
    CHECK(predict_nearest(m, x) == cb.labels[scan_nearest(cb, x)]);
  }
}

TEST_CASE("LVQ1 step") {
  const std::vector<double> x{1, 1};
  auto ok = make({{0, 0}, {9, 9}}, {0, 1});
  lvq1_step(ok, x, 0, 0.3);
  CHECK(ok.prototypes(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ok.prototypes(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ok.prototypes(1, 0) == 9.0);
  auto bad = make({{0, 0}, {9, 9}}, {0, 1});
  lvq1_step(bad, x, 1, 0.3);
  CHECK(bad.prototypes(0, 0) == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("LVQ1 contraction and expansion; non-winners untouched (property)") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto cb = random_codebook(rng, 20, 5, 2);
    std::vector<double> x(5);
    for (auto& v : x) v = rng.uniform();
    const double alpha = rng.uniform(0.01, 0.99);
    const int label = static_cast<int>(rng.below(2));
    const auto before = cb;
    const auto v = lvq1_step(cb, x, label, alpha);
    const double d0 = dist(before.prototypes.row(v), x);
    const double d1 = dist(cb.prototypes.row(v), x);
    const double factor = before.labels[v] == label ? 1 - alpha : 1 + alpha;
    CHECK(d1 == doctest::Approx(factor * d0).epsilon(1e-12));
    for (std::size_t i = 0; i < cb.size(); ++i) {
      if (i == v) continue;
      for (std::size_t d = 0; d < 5; ++d) CHECK(cb.prototypes(i, d) == before.prototypes(i, d));
    }
    CHECK(cb.labels == before.labels);
  }
}

TEST_CASE("OLVQ1 step and rate recurrence") {
  const std::vector<double> x{1};
  auto ok = make({{0}}, {0});
  olvq1_step(ok, x, 0);
  CHECK(ok.prototypes(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ok.rates[0] == doctest::Approx(0.3 / 1.3).epsilon(1e-15));
  CHECK(ok.rates[0] == doctest::Approx(0.2308).epsilon(1e-4));

  auto bad = make({{0}}, {0});
  olvq1_step(bad, x, 1);
  CHECK(bad.prototypes(0, 0) == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(bad.rates[0] == 0.3);  // 0.3 / 0.7 exceeds the cap
}

TEST_CASE("LVQ2 window rule") {
  const double k = (1 - 0.3) / (1 + 0.3);
  CHECK(k == doctest::Approx(0.538).epsilon(1e-3));
  CHECK(in_window(2.0, 2.0, 0.3));
  CHECK_FALSE(in_window(10.0, 1.0, 0.3));
  CHECK(in_window(0.0, 0.0, 0.3));

  // equidistant mixed pair: update fires
  auto cb = make({{0}, {2}}, {0, 1});
  CHECK(lvq2_step(cb, std::vector<double>{1}, 0, 0.1, 0.3));
  CHECK(cb.prototypes(0, 0) == doctest::Approx(0.1));
  CHECK(cb.prototypes(1, 0) == doctest::Approx(2.1));

  // far outside the window: nothing moves
  auto far = make({{0}, {11}}, {0, 1});
  const auto far_before = far;
  CHECK_FALSE(lvq2_step(far, std::vector<double>{1}, 1, 0.1, 0.3));
  CHECK(far == far_before);

  // both nearest share the class: nothing moves
  auto same = make({{0}, {2}, {50}}, {0, 0, 1});
  const auto same_before = same;
  CHECK_FALSE(lvq2_step(same, std::vector<double>{1}, 0, 0.1, 0.3));
  CHECK(same == same_before);
}

TEST_CASE("window predicate is symmetric (property)") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0, 3), b = rng.uniform(0, 3), w = rng.uniform(0.01, 0.99);
    CHECK(in_window(a, b, w) == in_window(b, a, w));
    CHECK(in_window(a, b, w) == (std::min(a / b, b / a) > (1 - w) / (1 + w)));
  }
}

TEST_CASE("LVQ3 branches") {
  auto same = make({{0}, {0}, {50}}, {0, 0, 1});
  CHECK(lvq3_step(same, std::vector<double>{1}, 0, 0.3, 0.3, 0.1));
  CHECK(same.prototypes(0, 0) == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(same.prototypes(1, 0) == doctest::Approx(0.03).epsilon(1e-15));

  auto mixed3 = make({{0}, {2}}, {0, 1});
  auto mixed2 = mixed3;
  lvq3_step(mixed3, std::vector<double>{1}, 0, 0.1, 0.3, 0.1);
  lvq2_step(mixed2, std::vector<double>{1}, 0, 0.1, 0.3);
  CHECK(mixed3 == mixed2);

  auto still = make({{0}, {0}, {50}}, {0, 0, 1});
  const auto before = still;
  lvq3_step(still, std::vector<double>{1}, 0, 0.3, 0.3, 0.0);
  CHECK(still == before);
}

TEST_CASE("SOM neighbourhood") {
  const std::array<double, 2> a{0, 0};
  CHECK(som_neighborhood(a, a, 0.3, 2.0) == 0.3);
  const double sigma = 1.5;
  const std::array<double, 2> b{sigma * std::sqrt(2.0), 0};
  CHECK(som_neighborhood(a, b, 0.3, sigma) == doctest::Approx(0.3 * std::exp(-1.0)).epsilon(1e-14));
  double prev = 1.0;
  for (double d = 0.0; d < 10.0; d += 0.25) {
    const double h = som_neighborhood(a, {d, 0}, 0.3, sigma);
    CHECK(h > 0.0);
    CHECK(h <= 0.3);
    if (d > 0.0) CHECK(h < prev);
    prev = h;
  }
  CHECK_THROWS_AS(som_neighborhood(a, a, 0.3, 0.0), std::invalid_argument);
}

TEST_CASE("hexagonal lattice geometry") {
  const auto l = hex_lattice(8, 8);
  REQUIRE(l.size() == 64);
  for (std::size_t i = 0; i < l.size(); ++i) {
    for (std::size_t j = i + 1; j < l.size(); ++j) CHECK(l[i] != l[j]);
  }
  // interior neuron has six neighbours at unit distance
  const auto centre = l[3 * 8 + 3];
  int unit = 0;
  for (const auto& p : l) {
    const double d = std::hypot(p[0] - centre[0], p[1] - centre[1]);
    unit += std::abs(d - 1.0) < 1e-12;
  }
  CHECK(unit == 6);
}

TEST_CASE("SOM step signs and fixed point") {
  Codebook som = make({{0.0, 0.0}, {2.0, 2.0}, {4.0, 4.0}}, {0, 0, 1});
  som.positions = {{{0, 0}}, {{1, 0}}, {{2, 0}}};
  const std::vector<double> x{0.0, 0.0};
  auto fixed = som;
  som_train_step(fixed, x, 0, 0.3, 1.0);
  CHECK(fixed.prototypes(0, 0) == 0.0);

  const std::vector<double> q{1.0, 1.0};
  const double d0 = dist(som.prototypes.row(0), q);
  for (auto rule : {SomSignRule::repel_winner, SomSignRule::per_neuron}) {
    CAPTURE(to_string(rule));
    auto pull = som;
    CHECK(som_train_step(pull, q, 0, 0.3, 1.0, 3.0, rule) == 0);
    CHECK(dist(pull.prototypes.row(0), q) == doctest::Approx((1 - 0.3) * d0).epsilon(1e-12));
    // neighbour 1 shares the label and moves toward q with h < alpha
    const double h1 = som_neighborhood({0, 0}, {1, 0}, 0.3, 1.0);
    CHECK(dist(pull.prototypes.row(1), q) == doctest::Approx((1 - h1) * dist(som.prototypes.row(1), q)));

    auto push = som;
    som_train_step(push, q, 1, 0.3, 1.0, 3.0, rule);
    CHECK(dist(push.prototypes.row(0), q) == doctest::Approx((1 + 0.3) * d0).epsilon(1e-12));

    // beyond the cutoff nothing moves
    auto narrow = som;
    som_train_step(narrow, q, 0, 0.3, 0.2, 3.0, rule);
    CHECK(narrow.prototypes(2, 0) == 4.0);
  }

  // neighbour 2 carries the other label: pushed away only under per_neuron
  auto literal = som;
  som_train_step(literal, q, 0, 0.3, 1.0, 3.0, SomSignRule::per_neuron);
  CHECK(dist(literal.prototypes.row(2), q) > dist(som.prototypes.row(2), q));
  auto bounded = som;
  som_train_step(bounded, q, 0, 0.3, 1.0, 3.0, SomSignRule::repel_winner);
  CHECK(bounded.prototypes(2, 0) == 4.0);
}

TEST_CASE("per-neuron repulsion diverges on multi-class data; winner-only repulsion does not") {
  const auto train = dataset::gaussian_blobs(800, 8, 4, 1.0, 0.3, 4);
  const auto test = dataset::gaussian_blobs(800, 8, 4, 1.0, 0.3, 5);
  CompetitiveConfig cfg;
  cfg.variant = Variant::som;
  const auto bounded = train_competitive(train.x, train.y, cfg);
  double largest = 0;
  for (double v : bounded.codebook.prototypes.values()) largest = std::max(largest, std::abs(v));
  CHECK(largest < 10.0);
  CHECK(accuracy(bounded.predict(test.x), test.y) >= 0.95);

  cfg.sign_rule = SomSignRule::per_neuron;
  cfg.epochs = 1;
  const auto literal = train_competitive(train.x, train.y, cfg);
  largest = 0;
  for (double v : literal.codebook.prototypes.values()) largest = std::max(largest, std::abs(v));
  CHECK(largest > 1e6);
  cfg.epochs = 60;  // long enough to overflow
  CHECK_THROWS_AS(train_competitive(train.x, train.y, cfg), TrainingError);
}

TEST_CASE("cutoff approximation error stays below 1e-4 alpha") {
  // the largest skipped neighbourhood value is at exactly 3 sigma
  const double skipped = som_neighborhood({0, 0}, {3.0, 0}, 1.0, 1.0);
  CHECK(skipped < 0.0112);  // e^{-4.5}
  CHECK(som_neighborhood({0, 0}, {3.0 * 1.5, 0}, 1.0, 1.5) == doctest::Approx(std::exp(-4.5)));
}

TEST_CASE("every learner separates two Gaussian blobs") {
  const auto train = dataset::gaussian_blobs(1000, 8, 2, 3.0, 0.6, 10);
  const auto test = dataset::gaussian_blobs(400, 8, 2, 3.0, 0.6, 11);
  for (auto v : {Variant::lvq1, Variant::olvq1, Variant::lvq2, Variant::lvq3, Variant::som}) {
    CompetitiveConfig cfg;
    cfg.variant = v;
    const auto model = train_competitive(train.x, train.y, cfg);
    CAPTURE(to_string(v));
    CHECK(accuracy(model.predict(test.x), test.y) >= 0.95);
  }
}

TEST_CASE("competitive training: zero epochs, determinism, fixed labels, persistence") {
  const auto data = dataset::gaussian_blobs(300, 4, 3, 2.0, 1.0, 3);
  for (auto v : {Variant::lvq1, Variant::olvq1, Variant::lvq2, Variant::lvq3, Variant::som}) {
    CAPTURE(to_string(v));
    CompetitiveConfig cfg;
    cfg.variant = v;
    cfg.epochs = 0;
    const auto initial = train_competitive(data.x, data.y, cfg);
    cfg.epochs = 3;
    const auto a = train_competitive(data.x, data.y, cfg);
    const auto b = train_competitive(data.x, data.y, cfg);
    CHECK(a == b);
    CHECK_FALSE(a.codebook.prototypes == initial.codebook.prototypes);
    CHECK(a.codebook.labels == initial.codebook.labels);
    cfg.chunk = 7;
    CHECK(train_competitive(data.x, data.y, cfg) == a);

    io::Writer w;
    a.save(w);
    io::Reader r(w.bytes());
    CHECK(CompetitiveModel::load(r) == a);
  }
  CompetitiveConfig som;
  som.variant = Variant::som;
  som.epochs = 0;
  const auto lattice = train_competitive(data.x, data.y, som);
  CHECK(lattice.codebook.size() == 64);
  CHECK(lattice.codebook.positions.size() == 64);
}

TEST_CASE("equidistant prototypes resolve to the lower index") {
  CompetitiveModel m{Variant::lvq1, make({{0.0}, {2.0}}, {1, 0})};
  CHECK(predict_nearest(m, std::vector<double>{1.0}) == 1);
  CompetitiveModel m2{Variant::lvq1, make({{0.0}, {1.0}}, {0, 1})};
  CHECK(predict_nearest(m2, std::vector<double>{1.0}) == 1);
}
