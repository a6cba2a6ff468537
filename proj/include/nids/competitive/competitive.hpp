#pragma once

// Prototype learners: LVQ1, OLVQ1, LVQ2 (window rule), LVQ3 and a
// supervised SOM on a hexagonal lattice. All of them classify by the label
// of the nearest prototype in Euclidean distance.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nids/common/matrix.hpp"
#include "nids/io/binary.hpp"

namespace nids::competitive {

enum class Variant { lvq1, olvq1, lvq2, lvq3, som };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

/// Labelled prototypes. `rates` holds the per-vector OLVQ1 learning rates;
/// `positions` the planar lattice coordinates when the set is a SOM.
struct Codebook {
  Matrix prototypes;
  std::vector<int> labels;
  std::vector<double> rates;
  double rate_cap = 0.3;  // OLVQ1 rates never grow past their initial value
  std::vector<std::array<double, 2>> positions;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dimension() const noexcept { return prototypes.cols(); }

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

/// `count` prototypes copied from training rows, class-stratified: each
/// class gets floor(count / classes), the remainder going to the lowest
/// class indices. Throws DataError when a class has no records or too few
/// for its quota.
Codebook init_codebooks(const Matrix& x, std::span<const int> y, std::size_t count, std::uint64_t seed,
                        double initial_rate = 0.3);

struct Match {
  std::size_t index = 0;
  double distance = 0.0;  // Euclidean
};

/// Euclidean argmin; ties to the lowest index.
Match nearest(const Codebook& cb, std::span<const double> x);
/// Closest and second closest (first.index != second.index); needs >= 2 prototypes.
std::array<Match, 2> two_nearest(const Codebook& cb, std::span<const double> x);

/// min(d_i / d_j, d_j / d_i) > (1 - w) / (1 + w); two zero distances count as ratio 1.
bool in_window(double d_i, double d_j, double window);

/// Winner moves toward x by alpha when its label matches, away otherwise.
/// Returns the winner index.
std::size_t lvq1_step(Codebook& cb, std::span<const double> x, int label, double alpha);

/// m_v <- (1 - c a_v) m_v + c a_v x with c = +1 on a correct match and -1
/// otherwise, then a_v <- a_v / (1 + c a_v), capped at cb.rate_cap.
std::size_t olvq1_step(Codebook& cb, std::span<const double> x, int label);

/// Updates the two nearest prototypes when exactly one carries the label
/// and the window test passes: the correct one toward x, the other away.
/// Returns whether anything moved.
bool lvq2_step(Codebook& cb, std::span<const double> x, int label, double alpha, double window);

/// LVQ2 on a mixed pair; when both nearest carry the label, both move
/// toward x by epsilon * alpha.
bool lvq3_step(Codebook& cb, std::span<const double> x, int label, double alpha, double window, double epsilon);

/// Hexagonal rows x cols lattice: odd rows shifted by half a column, rows
/// sqrt(3)/2 apart.
std::vector<std::array<double, 2>> hex_lattice(std::size_t rows, std::size_t cols);

/// alpha * exp(-|l_c - l_i|^2 / (2 sigma^2)).
double som_neighborhood(std::array<double, 2> winner, std::array<double, 2> other, double alpha, double sigma);

/// How the supervised SOM signs its neighbourhood update.
///
/// per_neuron: every neighbour moves toward x if its own label matches and
/// away otherwise. Repelled neurons grow by (1 + h) per step, and with a
/// lattice-wide neighbourhood the codebook diverges once some class is
/// outnumbered by the rest (any three-class problem, or 3:1 two-class data).
///
/// repel_winner: matching neighbours are pulled as above, but only the
/// winner itself is pushed away on a mismatch, as in LVQ1. Bounded.
enum class SomSignRule { repel_winner, per_neuron };

std::string_view to_string(SomSignRule r);
SomSignRule parse_sign_rule(std::string_view name);

/// Best-matching unit by Euclidean distance, then every neuron within
/// `cutoff_sigmas` * sigma of it on the lattice moves by its signed h.
/// Returns the winner index.
std::size_t som_train_step(Codebook& som, std::span<const double> x, int label, double alpha, double sigma,
                           double cutoff_sigmas = 3.0, SomSignRule rule = SomSignRule::repel_winner);

struct CompetitiveConfig {
  Variant variant = Variant::lvq1;
  std::size_t codebooks = 20;
  double learning_rate = 0.3;  // alpha(0), decays linearly to 0 over the run
  std::size_t epochs = 10;
  double window = 0.3;
  double epsilon = 0.1;
  std::size_t som_rows = 8;
  std::size_t som_cols = 8;
  double sigma_start = 8.0;
  double sigma_end = 1.0;
  double cutoff_sigmas = 3.0;
  SomSignRule sign_rule = SomSignRule::repel_winner;
  std::size_t chunk = 100;  // streaming granularity only
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct CompetitiveModel {
  Variant variant = Variant::lvq1;
  Codebook codebook;

  int predict(std::span<const double> x) const;
  std::vector<int> predict(const Matrix& x) const;

  void save(io::Writer& out) const;
  static CompetitiveModel load(io::Reader& in);

  friend bool operator==(const CompetitiveModel&, const CompetitiveModel&) = default;
};

/// Seeded initialisation, then `epochs` passes over the rows in a fresh
/// shuffled order each pass, one update per record. Throws TrainingError if
/// a prototype stops being finite.
CompetitiveModel train_competitive(const Matrix& x, std::span<const int> y, const CompetitiveConfig& cfg);

/// Label of the nearest prototype (or best-matching unit), ties to the lowest index.
int predict_nearest(const CompetitiveModel& model, std::span<const double> x);

}  // namespace nids::competitive
