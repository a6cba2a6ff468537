#include "nids/deep/recurrent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nids/simd/kernels.hpp"

namespace nids::deep {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// y[r] += W[r, :] . x for `rows` rows starting at `w`
void add_gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  const auto& k = simd::active();
  for (std::size_t r = 0; r < rows; ++r) y[r] += k.dot(w + r * cols, x, cols);
}

// y += W^T g
void add_gemv_t(const double* w, std::size_t rows, std::size_t cols, const double* g, double* y) {
  const auto& k = simd::active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], w + r * cols, y, cols);
  }
}

// G += g x^T
void add_outer(const double* g, std::size_t rows, const double* x, std::size_t cols, double* out) {
  const auto& k = simd::active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], x, out + r * cols, cols);
  }
}

void check_shapes(const RecurrentSpec& spec, std::span<const double> params, std::size_t h, std::size_t x) {
  if (params.size() != spec.parameter_count() || h != spec.units || x != spec.inputs) {
    throw std::invalid_argument("recurrent cell: shape mismatch");
  }
}

// Pre-activation gate values and activations for one step. `gates` gets G*H
// activated values; for GRU `reset_h` gets r * h_prev.
void step_gates(const RecurrentSpec& spec, std::span<const double> p, const double* h_prev, const double* x,
                double* gates, double* reset_h) {
  const std::size_t H = spec.units, D = spec.inputs, GH = spec.gates() * H;
  const double* wx = p.data() + spec.wx_offset();
  const double* wh = p.data() + spec.wh_offset();
  const double* b = p.data() + spec.bias_offset();
  std::copy(b, b + GH, gates);
  add_gemv(wx, GH, D, x, gates);
  switch (spec.kind) {
    case CellKind::rnn:
      add_gemv(wh, H, H, h_prev, gates);
      for (std::size_t i = 0; i < H; ++i) gates[i] = std::tanh(gates[i]);
      break;
    case CellKind::lstm:
      add_gemv(wh, GH, H, h_prev, gates);
      for (std::size_t i = 0; i < H; ++i) {
        gates[i] = sigmoid(gates[i]);                  // input
        gates[H + i] = sigmoid(gates[H + i]);          // forget
        gates[2 * H + i] = std::tanh(gates[2 * H + i]);  // candidate
        gates[3 * H + i] = sigmoid(gates[3 * H + i]);  // output
      }
      break;
    case CellKind::gru:
      add_gemv(wh, 2 * H, H, h_prev, gates);
      for (std::size_t i = 0; i < 2 * H; ++i) gates[i] = sigmoid(gates[i]);
      for (std::size_t i = 0; i < H; ++i) reset_h[i] = gates[H + i] * h_prev[i];
      add_gemv(wh + 2 * H * H, H, H, reset_h, gates + 2 * H);
      for (std::size_t i = 0; i < H; ++i) gates[2 * H + i] = std::tanh(gates[2 * H + i]);
      break;
  }
}

}  // namespace

std::string_view to_string(CellKind k) {
  switch (k) {
    case CellKind::rnn: return "rnn";
    case CellKind::lstm: return "lstm";
    case CellKind::gru: return "gru";
  }
  return "?";
}

void initialize_cell(const RecurrentSpec& spec, std::span<double> params, Rng& rng) {
  const std::size_t H = spec.units, GH = spec.gates() * H;
  const double lx = std::sqrt(6.0 / static_cast<double>(spec.inputs + GH));
  const double lh = std::sqrt(6.0 / static_cast<double>(H + GH));
  for (std::size_t i = spec.wx_offset(); i < spec.wh_offset(); ++i) params[i] = rng.uniform(-lx, lx);
  for (std::size_t i = spec.wh_offset(); i < spec.bias_offset(); ++i) params[i] = rng.uniform(-lh, lh);
  for (std::size_t i = 0; i < GH; ++i) params[spec.bias_offset() + i] = 0.0;
  if (spec.kind == CellKind::lstm) {
    for (std::size_t i = 0; i < H; ++i) params[spec.bias_offset() + H + i] = 1.0;
  }
}

std::vector<double> rnn_cell_step(const RecurrentSpec& spec, std::span<const double> params,
                                  std::span<const double> h_prev, std::span<const double> x) {
  check_shapes(spec, params, h_prev.size(), x.size());
  std::vector<double> h(spec.units);
  step_gates(spec, params, h_prev.data(), x.data(), h.data(), nullptr);
  return h;
}

LstmState lstm_cell_step(const RecurrentSpec& spec, std::span<const double> params,
                         std::span<const double> h_prev, std::span<const double> c_prev,
                         std::span<const double> x) {
  check_shapes(spec, params, h_prev.size(), x.size());
  if (c_prev.size() != spec.units) throw std::invalid_argument("recurrent cell: shape mismatch");
  const std::size_t H = spec.units;
  std::vector<double> g(4 * H);
  step_gates(spec, params, h_prev.data(), x.data(), g.data(), nullptr);
  LstmState s{std::vector<double>(H), std::vector<double>(H)};
  for (std::size_t i = 0; i < H; ++i) {
    s.c[i] = g[H + i] * c_prev[i] + g[i] * g[2 * H + i];
    s.h[i] = g[3 * H + i] * std::tanh(s.c[i]);
  }
  return s;
}

std::vector<double> gru_cell_step(const RecurrentSpec& spec, std::span<const double> params,
                                  std::span<const double> h_prev, std::span<const double> x) {
  check_shapes(spec, params, h_prev.size(), x.size());
  const std::size_t H = spec.units;
  std::vector<double> g(3 * H), rh(H), h(H);
  step_gates(spec, params, h_prev.data(), x.data(), g.data(), rh.data());
  for (std::size_t i = 0; i < H; ++i) h[i] = (1.0 - g[i]) * h_prev[i] + g[i] * g[2 * H + i];
  return h;
}

std::span<const double> SequenceTrace::forward(const RecurrentSpec& spec, std::span<const double> params,
                                               std::span<const double> sequence, std::size_t steps) {
  if (steps == 0 || sequence.size() != steps * spec.inputs || params.size() != spec.parameter_count()) {
    throw std::invalid_argument("recurrent sequence: shape mismatch");
  }
  const std::size_t H = spec.units, GH = spec.gates() * H;
  steps_ = steps;
  units_ = H;
  sequence_ = sequence;
  h_.assign((steps + 1) * H, 0.0);
  gates_.resize(steps * GH);
  if (spec.kind == CellKind::lstm) {
    c_.assign((steps + 1) * H, 0.0);
    tanh_c_.resize(steps * H);
  }
  if (spec.kind == CellKind::gru) reset_h_.resize(steps * H);

  for (std::size_t t = 0; t < steps; ++t) {
    const double* hp = h_.data() + t * H;
    double* hn = h_.data() + (t + 1) * H;
    double* g = gates_.data() + t * GH;
    step_gates(spec, params, hp, sequence.data() + t * spec.inputs, g,
               spec.kind == CellKind::gru ? reset_h_.data() + t * H : nullptr);
    switch (spec.kind) {
      case CellKind::rnn:
        std::copy(g, g + H, hn);
        break;
      case CellKind::lstm: {
        const double* cp = c_.data() + t * H;
        double* cn = c_.data() + (t + 1) * H;
        double* tc = tanh_c_.data() + t * H;
        for (std::size_t i = 0; i < H; ++i) {
          cn[i] = g[H + i] * cp[i] + g[i] * g[2 * H + i];
          tc[i] = std::tanh(cn[i]);
          hn[i] = g[3 * H + i] * tc[i];
        }
        break;
      }
      case CellKind::gru:
        for (std::size_t i = 0; i < H; ++i) hn[i] = (1.0 - g[i]) * hp[i] + g[i] * g[2 * H + i];
        break;
    }
  }
  return hidden(steps);
}

std::span<const double> SequenceTrace::hidden(std::size_t step) const {
  return {h_.data() + step * units_, units_};
}

void SequenceTrace::backward(const RecurrentSpec& spec, std::span<const double> params,
                             std::span<const double> final_grad, std::span<double> grad,
                             std::span<double> input_grad) {
  const std::size_t H = spec.units, D = spec.inputs, G = spec.gates(), GH = G * H;
  const double* wx = params.data() + spec.wx_offset();
  const double* wh = params.data() + spec.wh_offset();
  double* gwx = grad.data() + spec.wx_offset();
  double* gwh = grad.data() + spec.wh_offset();
  double* gb = grad.data() + spec.bias_offset();

  // scratch: dh, dh_prev, dc, da (GH), grh (H)
  scratch_.assign(4 * H + GH, 0.0);
  double* dh = scratch_.data();
  double* dhp = dh + H;
  double* dc = dhp + H;
  double* grh = dc + H;
  double* da = grh + H;
  std::copy(final_grad.begin(), final_grad.end(), dh);

  for (std::size_t t = steps_; t-- > 0;) {
    const double* hp = h_.data() + t * H;
    const double* hn = h_.data() + (t + 1) * H;
    const double* g = gates_.data() + t * GH;
    const double* x = sequence_.data() + t * D;
    std::fill(dhp, dhp + H, 0.0);

    switch (spec.kind) {
      case CellKind::rnn:
        for (std::size_t i = 0; i < H; ++i) da[i] = dh[i] * (1.0 - hn[i] * hn[i]);
        add_outer(da, H, hp, H, gwh);
        add_gemv_t(wh, H, H, da, dhp);
        break;
      case CellKind::lstm: {
        const double* cp = c_.data() + t * H;
        const double* tc = tanh_c_.data() + t * H;
        for (std::size_t i = 0; i < H; ++i) {
          const double ig = g[i], fg = g[H + i], cg = g[2 * H + i], og = g[3 * H + i];
          const double dct = dc[i] + dh[i] * og * (1.0 - tc[i] * tc[i]);
          da[i] = dct * cg * ig * (1.0 - ig);
          da[H + i] = dct * cp[i] * fg * (1.0 - fg);
          da[2 * H + i] = dct * ig * (1.0 - cg * cg);
          da[3 * H + i] = dh[i] * tc[i] * og * (1.0 - og);
          dc[i] = dct * fg;
        }
        add_outer(da, GH, hp, H, gwh);
        add_gemv_t(wh, GH, H, da, dhp);
        break;
      }
      case CellKind::gru: {
        const double* rh = reset_h_.data() + t * H;
        for (std::size_t i = 0; i < H; ++i) {
          const double z = g[i], n = g[2 * H + i];
          da[2 * H + i] = dh[i] * z * (1.0 - n * n);
          da[i] = dh[i] * (n - hp[i]) * z * (1.0 - z);
          dhp[i] = dh[i] * (1.0 - z);
        }
        std::fill(grh, grh + H, 0.0);
        add_gemv_t(wh + 2 * H * H, H, H, da + 2 * H, grh);
        for (std::size_t i = 0; i < H; ++i) {
          const double r = g[H + i];
          da[H + i] = grh[i] * hp[i] * r * (1.0 - r);
          dhp[i] += grh[i] * r;
        }
        add_outer(da, 2 * H, hp, H, gwh);
        add_outer(da + 2 * H, H, rh, H, gwh + 2 * H * H);
        add_gemv_t(wh, 2 * H, H, da, dhp);
        break;
      }
    }
    add_outer(da, GH, x, D, gwx);
    for (std::size_t i = 0; i < GH; ++i) gb[i] += da[i];
    if (!input_grad.empty()) {
      double* dx = input_grad.data() + t * D;
      std::fill(dx, dx + D, 0.0);
      add_gemv_t(wx, GH, D, da, dx);
    }
    std::copy(dhp, dhp + H, dh);
  }
}

}  // namespace nids::deep
