#pragma once

// WiSARD weightless classifier. Scaled features are thermometer-coded into a
// binary retina; a seeded permutation of retina positions is cut into
// tuples of n bits, and each tuple addresses one RAM neuron of 2^n one-bit
// cells. Every class owns a discriminator (one RAM per tuple) and all
// discriminators share the same mapping.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/io/binary.hpp"

namespace nids::wisard {

using Bits = std::vector<std::uint8_t>;  // one 0/1 byte per retina position

struct RetinaConfig {
  std::size_t features = 76;
  std::size_t bits_per_feature = 16;
  std::size_t tuple_size = 8;  // n, address bits per RAM

  std::size_t raw_bits() const noexcept { return features * bits_per_feature; }
  /// Retina length rounded up to a multiple of n; the padding bits are always 0.
  std::size_t retina_bits() const noexcept {
    return tuple_size == 0 ? 0 : (raw_bits() + tuple_size - 1) / tuple_size * tuple_size;
  }
  std::size_t rams() const noexcept { return tuple_size == 0 ? 0 : retina_bits() / tuple_size; }

  /// Throws std::invalid_argument for empty shapes or n outside [1, 24].
  void validate() const;

  friend bool operator==(const RetinaConfig&, const RetinaConfig&) = default;
};

/// First floor(v * B) of each feature's B bits set; v is clamped to [0, 1]
/// and NaN reads as 0.
Bits thermometer_encode(std::span<const double> x, std::size_t bits_per_feature);

/// Bijection over retina positions; RAM i reads positions
/// perm[i*n .. i*n + n), the j-th of which is address bit j.
class TupleMapping {
 public:
  TupleMapping() = default;
  TupleMapping(std::size_t retina_bits, std::size_t tuple_size, std::uint64_t seed);
  /// Explicit permutation; throws std::invalid_argument if it is not a
  /// bijection over [0, size) or size is not a multiple of n.
  TupleMapping(std::vector<std::size_t> permutation, std::size_t tuple_size);

  std::size_t tuple_size() const noexcept { return n_; }
  std::size_t rams() const noexcept { return n_ == 0 ? 0 : perm_.size() / n_; }
  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }

  /// Address of every RAM for `pattern`; positions past the pattern end read as 0.
  void addresses(std::span<const std::uint8_t> pattern, std::vector<std::uint32_t>& out) const;

  friend bool operator==(const TupleMapping&, const TupleMapping&) = default;

 private:
  std::vector<std::size_t> perm_;
  std::size_t n_ = 0;
};

/// K RAM neurons of 2^n one-bit cells, packed in 64-bit words.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(std::size_t rams, std::size_t tuple_size);

  void write(std::span<const std::uint32_t> addresses);
  /// Fraction of RAMs whose addressed cell is 1.
  double response(std::span<const std::uint32_t> addresses) const;
  bool cell(std::size_t ram, std::uint32_t address) const;
  std::size_t ones() const noexcept;

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  friend bool operator==(const Discriminator&, const Discriminator&) = default;

 private:
  friend class WisardModel;
  std::size_t rams_ = 0;
  std::size_t words_per_ram_ = 0;
  std::vector<std::uint64_t> words_;
};

struct Classification {
  std::size_t label = 0;
  std::vector<double> responses;  // one per class
};

class WisardModel {
 public:
  WisardModel() = default;
  WisardModel(RetinaConfig cfg, std::size_t classes, std::uint64_t seed);
  /// Custom mapping (its size must equal cfg.retina_bits()).
  WisardModel(RetinaConfig cfg, std::size_t classes, TupleMapping mapping);

  const RetinaConfig& config() const noexcept { return cfg_; }
  const TupleMapping& mapping() const noexcept { return mapping_; }
  std::size_t class_count() const noexcept { return discriminators_.size(); }
  const Discriminator& discriminator(std::size_t c) const { return discriminators_.at(c); }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Write-1 update of class c's RAMs. Throws std::out_of_range for an
  /// unknown class and std::invalid_argument for a wrong-length pattern.
  void train_pattern(std::span<const std::uint8_t> bits, std::size_t c);
  double response(std::span<const std::uint8_t> bits, std::size_t c) const;
  /// Argmax over responses, ties to the lowest class index.
  Classification classify(std::span<const std::uint8_t> bits) const;

  /// Scaled feature vector in, encoded internally.
  void train_features(std::span<const double> x, std::size_t c);
  Classification classify_features(std::span<const double> x) const;

  std::vector<int> predict(const Matrix& x) const;

  void save(io::Writer& out) const;
  static WisardModel load(io::Reader& in);

  friend bool operator==(const WisardModel&, const WisardModel&) = default;

 private:
  void check_pattern(std::span<const std::uint8_t> bits) const;

  RetinaConfig cfg_;
  TupleMapping mapping_;
  std::vector<Discriminator> discriminators_;
  std::uint64_t seed_ = 0;
};

/// Streams the rows of `x` into the model `chunk` records at a time. The
/// result equals sequential train_features over every row; `chunk` only
/// sets how often `progress` is called (with records done so far).
void train_dataset(WisardModel& model, const Matrix& x, std::span<const int> y, std::size_t chunk = 100,
                   const std::function<void(std::size_t)>& progress = {});

}  // namespace nids::wisard
