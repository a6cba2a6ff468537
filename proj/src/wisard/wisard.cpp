#include "nids/wisard/wisard.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nids/common/argmax.hpp"
#include "nids/common/error.hpp"
#include "nids/common/rng.hpp"

namespace nids::wisard {

void RetinaConfig::validate() const {
  if (features == 0 || bits_per_feature == 0) throw std::invalid_argument("wisard: empty retina");
  if (tuple_size == 0 || tuple_size > 24) throw std::invalid_argument("wisard: tuple size must lie in [1, 24]");
}

Bits thermometer_encode(std::span<const double> x, std::size_t bits_per_feature) {
  Bits out(x.size() * bits_per_feature, 0);
  const double b = static_cast<double>(bits_per_feature);
  for (std::size_t f = 0; f < x.size(); ++f) {
    double v = x[f];
    if (!(v > 0.0)) v = 0.0;
    if (v > 1.0) v = 1.0;
    const auto set = static_cast<std::size_t>(std::floor(v * b));
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(f * bits_per_feature), set, std::uint8_t{1});
  }
  return out;
}

TupleMapping::TupleMapping(std::size_t retina_bits, std::size_t tuple_size, std::uint64_t seed)
    : perm_(retina_bits), n_(tuple_size) {
  if (n_ == 0 || retina_bits % n_ != 0) throw std::invalid_argument("wisard: retina not a multiple of n");
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm_));
}

TupleMapping::TupleMapping(std::vector<std::size_t> permutation, std::size_t tuple_size)
    : perm_(std::move(permutation)), n_(tuple_size) {
  if (n_ == 0 || perm_.size() % n_ != 0) throw std::invalid_argument("wisard: retina not a multiple of n");
  std::vector<bool> seen(perm_.size(), false);
  for (auto p : perm_) {
    if (p >= perm_.size() || seen[p]) throw std::invalid_argument("wisard: mapping is not a permutation");
    seen[p] = true;
  }
}

void TupleMapping::addresses(std::span<const std::uint8_t> pattern, std::vector<std::uint32_t>& out) const {
  const std::size_t k = rams();
  out.resize(k);
  const std::size_t len = pattern.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::uint32_t a = 0;
    const std::size_t* tuple = perm_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) {
      const auto pos = tuple[j];
      if (pos < len && pattern[pos]) a |= std::uint32_t{1} << j;
    }
    out[i] = a;
  }
}

Discriminator::Discriminator(std::size_t rams, std::size_t tuple_size)
    : rams_(rams), words_per_ram_(((std::size_t{1} << tuple_size) + 63) / 64), words_(rams * words_per_ram_, 0) {}

void Discriminator::write(std::span<const std::uint32_t> addresses) {
  for (std::size_t i = 0; i < rams_; ++i) {
    words_[i * words_per_ram_ + addresses[i] / 64] |= std::uint64_t{1} << (addresses[i] % 64);
  }
}

bool Discriminator::cell(std::size_t ram, std::uint32_t address) const {
  return (words_[ram * words_per_ram_ + address / 64] >> (address % 64)) & 1u;
}

double Discriminator::response(std::span<const std::uint32_t> addresses) const {
  if (rams_ == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rams_; ++i) hits += cell(i, addresses[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rams_);
}

std::size_t Discriminator::ones() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

WisardModel::WisardModel(RetinaConfig cfg, std::size_t classes, std::uint64_t seed)
    : WisardModel(cfg, classes, (cfg.validate(), TupleMapping(cfg.retina_bits(), cfg.tuple_size, seed))) {
  seed_ = seed;
}

WisardModel::WisardModel(RetinaConfig cfg, std::size_t classes, TupleMapping mapping)
    : cfg_(cfg), mapping_(std::move(mapping)) {
  cfg_.validate();
  if (classes == 0) throw std::invalid_argument("wisard: need at least one class");
  if (mapping_.permutation().size() != cfg_.retina_bits() || mapping_.tuple_size() != cfg_.tuple_size) {
    throw std::invalid_argument("wisard: mapping does not match the retina");
  }
  discriminators_.assign(classes, Discriminator(cfg_.rams(), cfg_.tuple_size));
}

void WisardModel::check_pattern(std::span<const std::uint8_t> bits) const {
  if (bits.size() != cfg_.raw_bits() && bits.size() != cfg_.retina_bits()) {
    throw std::invalid_argument("wisard: pattern has " + std::to_string(bits.size()) + " bits, expected " +
                                std::to_string(cfg_.raw_bits()));
  }
}

void WisardModel::train_pattern(std::span<const std::uint8_t> bits, std::size_t c) {
  if (c >= discriminators_.size()) throw std::out_of_range("wisard: unknown class " + std::to_string(c));
  check_pattern(bits);
  std::vector<std::uint32_t> addr;
  mapping_.addresses(bits, addr);
  discriminators_[c].write(addr);
}

double WisardModel::response(std::span<const std::uint8_t> bits, std::size_t c) const {
  check_pattern(bits);
  std::vector<std::uint32_t> addr;
  mapping_.addresses(bits, addr);
  return discriminators_.at(c).response(addr);
}

Classification WisardModel::classify(std::span<const std::uint8_t> bits) const {
  check_pattern(bits);
  std::vector<std::uint32_t> addr;
  mapping_.addresses(bits, addr);
  Classification out;
  out.responses.reserve(discriminators_.size());
  for (const auto& d : discriminators_) out.responses.push_back(d.response(addr));
  out.label = argmax(std::span<const double>(out.responses));
  return out;
}

void WisardModel::train_features(std::span<const double> x, std::size_t c) {
  if (x.size() != cfg_.features) throw std::invalid_argument("wisard: feature count mismatch");
  train_pattern(thermometer_encode(x, cfg_.bits_per_feature), c);
}

Classification WisardModel::classify_features(std::span<const double> x) const {
  if (x.size() != cfg_.features) throw std::invalid_argument("wisard: feature count mismatch");
  return classify(thermometer_encode(x, cfg_.bits_per_feature));
}

std::vector<int> WisardModel::predict(const Matrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = static_cast<int>(classify_features(x.row(r)).label);
  return out;
}

void WisardModel::save(io::Writer& out) const {
  out.u64(cfg_.features);
  out.u64(cfg_.bits_per_feature);
  out.u64(cfg_.tuple_size);
  out.u64(seed_);
  out.u64s(mapping_.permutation());
  out.u64(discriminators_.size());
  for (const auto& d : discriminators_) {
    out.u64(d.words_.size());
    for (auto w : d.words_) out.u64(w);
  }
}

WisardModel WisardModel::load(io::Reader& in) {
  RetinaConfig cfg;
  cfg.features = in.u64();
  cfg.bits_per_feature = in.u64();
  cfg.tuple_size = in.u64();
  const auto seed = in.u64();
  auto perm = in.u64s();
  const auto classes = in.u64();
  WisardModel m;
  try {
    m = WisardModel(cfg, classes, TupleMapping(std::move(perm), cfg.tuple_size));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file corrupt: ") + e.what());
  }
  m.seed_ = seed;
  for (auto& d : m.discriminators_) {
    if (in.u64() != d.words_.size()) throw DataError("model file corrupt: RAM size");
    for (auto& w : d.words_) w = in.u64();
  }
  return m;
}

void train_dataset(WisardModel& model, const Matrix& x, std::span<const int> y, std::size_t chunk,
                   const std::function<void(std::size_t)>& progress) {
  if (x.rows() != y.size()) throw std::invalid_argument("wisard: one label per row required");
  if (chunk == 0) chunk = 1;
  for (std::size_t start = 0; start < x.rows(); start += chunk) {
    const auto end = std::min(x.rows(), start + chunk);
    for (std::size_t r = start; r < end; ++r) {
      if (y[r] < 0) throw std::out_of_range("wisard: negative label");
      model.train_features(x.row(r), static_cast<std::size_t>(y[r]));
    }
    if (progress) progress(end);
  }
}

}  // namespace nids::wisard
