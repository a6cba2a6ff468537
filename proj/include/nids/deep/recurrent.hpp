#pragma once

// Single-layer recurrent cells with reverse-mode gradients over an unrolled
// sequence. Parameters sit in one flat span:
//   W_x  (G*H x D)  row-major
//   W_h  (G*H x H)  row-major
//   b    (G*H)
// with G gate blocks of H rows each: RNN G=1; LSTM G=4 ordered
// [input, forget, candidate, output]; GRU G=3 ordered [update z, reset r,
// candidate].
//
//   RNN   h = tanh(W_x x + W_h h' + b)
//   LSTM  c = f * c' + i * g,  h = o * tanh(c)
//   GRU   n = tanh(W_xn x + W_hn (r * h') + b_n),  h = (1 - z) * h' + z * n

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nids/common/rng.hpp"

namespace nids::deep {

enum class CellKind { rnn, lstm, gru };

std::string_view to_string(CellKind k);

struct RecurrentSpec {
  CellKind kind = CellKind::rnn;
  std::size_t units = 1;   // H
  std::size_t inputs = 1;  // D, features per timestep

  std::size_t gates() const noexcept { return kind == CellKind::lstm ? 4 : kind == CellKind::gru ? 3 : 1; }
  std::size_t parameter_count() const noexcept { return gates() * units * (inputs + units + 1); }
  std::size_t wx_offset() const noexcept { return 0; }
  std::size_t wh_offset() const noexcept { return gates() * units * inputs; }
  std::size_t bias_offset() const noexcept { return gates() * units * (inputs + units); }
};

/// Glorot-uniform input and recurrent weights, zero biases except the LSTM
/// forget gate, which starts at 1.
void initialize_cell(const RecurrentSpec& spec, std::span<double> params, Rng& rng);

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

std::vector<double> rnn_cell_step(const RecurrentSpec& spec, std::span<const double> params,
                                  std::span<const double> h_prev, std::span<const double> x);
LstmState lstm_cell_step(const RecurrentSpec& spec, std::span<const double> params,
                         std::span<const double> h_prev, std::span<const double> c_prev,
                         std::span<const double> x);
std::vector<double> gru_cell_step(const RecurrentSpec& spec, std::span<const double> params,
                                  std::span<const double> h_prev, std::span<const double> x);

/// Unrolled pass over `steps` timesteps of `spec.inputs` features each,
/// starting from zero state. Keeps what the backward pass needs.
class SequenceTrace {
 public:
  /// Runs the sequence; returns the final hidden state.
  std::span<const double> forward(const RecurrentSpec& spec, std::span<const double> params,
                                  std::span<const double> sequence, std::size_t steps);

  /// Backpropagation through time from dL/dh at the last step. Adds
  /// parameter gradients into `grad`; writes dL/dx into `input_grad` when it
  /// is non-empty.
  void backward(const RecurrentSpec& spec, std::span<const double> params, std::span<const double> final_grad,
                std::span<double> grad, std::span<double> input_grad = {});

  std::span<const double> hidden(std::size_t step) const;

 private:
  std::size_t steps_ = 0;
  std::size_t units_ = 0;
  std::span<const double> sequence_;
  // per step: hidden states (steps + 1 rows, row 0 is the zero start),
  // activated gates (G*H per step) and, for LSTM, cell states and tanh(c).
  std::vector<double> h_;
  std::vector<double> c_;
  std::vector<double> tanh_c_;
  std::vector<double> gates_;
  std::vector<double> reset_h_;  // GRU: r * h'
  std::vector<double> scratch_;
};

}  // namespace nids::deep
