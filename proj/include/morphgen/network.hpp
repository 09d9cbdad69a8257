#pragma once

// Forward and backward passes of the window classifier:
//   embedding -> same-size 1-D convolution -> max pool (2, stride 2)
//   -> LSTM over the pooled sequence (last hidden state)
//   -> dense + tanh -> softmax.
// Templated on the element type: float for training and inference, double for
// finite-difference gradient checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "morphgen/error.hpp"
#include "morphgen/kernels.hpp"

namespace morphgen {

enum class Optimizer : std::uint8_t { Sgd, Adam };

struct Hyperparameters {
  std::size_t window_length = 9;
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 128;
  std::size_t conv_filter_size = 7;
  std::size_t conv_filters = 128;
  std::size_t lstm_units = 70;
  std::size_t classes = 3;
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  std::uint64_t rng_seed = 42;
  Optimizer optimizer = Optimizer::Sgd;

  // Throws UsageError on inconsistent shapes.
  void validate() const;
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

template <typename T>
struct Parameters {
  std::vector<T> embedding;       // vocab x d
  std::vector<T> conv_kernel;     // filters x (filter_size * d)
  std::vector<T> conv_bias;       // filters
  std::vector<T> lstm_input;      // 4H x filters, gate blocks i, f, g, o
  std::vector<T> lstm_recurrent;  // 4H x H
  std::vector<T> lstm_bias;       // 4H
  std::vector<T> dense_weight;    // classes x H
  std::vector<T> dense_bias;      // classes

  static Parameters zeros(const Hyperparameters& hp) {
    const std::size_t d = hp.embedding_dim, f = hp.conv_filters, h = hp.lstm_units;
    Parameters p;
    p.embedding.assign(hp.vocab_size * d, T(0));
    p.conv_kernel.assign(f * hp.conv_filter_size * d, T(0));
    p.conv_bias.assign(f, T(0));
    p.lstm_input.assign(4 * h * f, T(0));
    p.lstm_recurrent.assign(4 * h * h, T(0));
    p.lstm_bias.assign(4 * h, T(0));
    p.dense_weight.assign(hp.classes * h, T(0));
    p.dense_bias.assign(hp.classes, T(0));
    return p;
  }

  // Tensors in their serialization order.
  template <typename F>
  void for_each(F&& fn) {
    fn("embedding", embedding);
    fn("conv_kernel", conv_kernel);
    fn("conv_bias", conv_bias);
    fn("lstm_input", lstm_input);
    fn("lstm_recurrent", lstm_recurrent);
    fn("lstm_bias", lstm_bias);
    fn("dense_weight", dense_weight);
    fn("dense_bias", dense_bias);
  }
  template <typename F>
  void for_each(F&& fn) const {
    const_cast<Parameters*>(this)->for_each([&](const char* name, std::vector<T>& v) { fn(name, std::as_const(v)); });
  }

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

template <typename T>
struct Gradients {
  Parameters<T> d;
  // Embedding rows with non-zero gradient since the last reset.
  std::vector<std::int32_t> touched_rows;
  std::vector<std::uint8_t> touched_mask;

  explicit Gradients(const Hyperparameters& hp) : d(Parameters<T>::zeros(hp)), touched_mask(hp.vocab_size, 0) {}

  void reset(std::size_t embedding_dim) {
    for (auto row : touched_rows) {
      std::fill_n(d.embedding.begin() + static_cast<std::ptrdiff_t>(row) * static_cast<std::ptrdiff_t>(embedding_dim),
                  embedding_dim, T(0));
      touched_mask[static_cast<std::size_t>(row)] = 0;
    }
    touched_rows.clear();
    auto zero = [](const char* name, std::vector<T>& v) {
      if (std::string_view(name) != "embedding") std::fill(v.begin(), v.end(), T(0));
    };
    d.for_each(zero);
  }
};

template <typename T>
struct Activations {
  std::vector<T> x;                     // (n + k - 1) x d, zero-padded embedding rows
  std::vector<T> conv;                  // n x filters
  std::vector<T> pooled;                // m x filters
  std::vector<std::uint32_t> pool_src;  // m x filters, conv row that won each pool
  std::vector<T> gates;                 // m x 4H, activated i, f, g, o
  std::vector<T> cell;                  // m x H
  std::vector<T> cell_tanh;             // m x H
  std::vector<T> hidden;                // m x H
  std::vector<T> dense;                 // classes, after tanh
  std::array<double, 3> probs{};
};

namespace detail {

inline float dot(const float* a, const float* b, std::size_t n) { return kernels::active().dot(a, b, n); }
inline double dot(const double* a, const double* b, std::size_t n) { return kernels::scalar::dot(a, b, n); }
inline void axpy(float alpha, const float* x, float* y, std::size_t n) { kernels::active().axpy(alpha, x, y, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { kernels::scalar::axpy(alpha, x, y, n); }
inline void gemv(const float* m, std::size_t r, std::size_t c, const float* x, float* y) {
  kernels::active().gemv(m, r, c, x, y);
}
inline void gemv(const double* m, std::size_t r, std::size_t c, const double* x, double* y) {
  kernels::scalar::gemv(m, r, c, x, y);
}
inline void gemv_t_acc(const float* m, std::size_t r, std::size_t c, const float* v, float* y) {
  kernels::active().gemv_t_acc(m, r, c, v, y);
}
inline void gemv_t_acc(const double* m, std::size_t r, std::size_t c, const double* v, double* y) {
  kernels::scalar::gemv_t_acc(m, r, c, v, y);
}
inline void ger_acc(float* m, std::size_t r, std::size_t c, const float* u, const float* v) {
  kernels::active().ger_acc(m, r, c, u, v);
}
inline void ger_acc(double* m, std::size_t r, std::size_t c, const double* u, const double* v) {
  kernels::scalar::ger_acc(m, r, c, u, v);
}

template <typename T>
T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

template <typename T>
void require_finite(std::span<const T> values, const char* layer) {
  for (T v : values) {
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite activation in layer ") + layer);
  }
}

}  // namespace detail

inline std::size_t pooled_length(std::size_t n) { return (n + 1) / 2; }

// Runs the network on one window of vocabulary indices and fills `act`.
template <typename T>
void forward_pass(const Parameters<T>& p, const Hyperparameters& hp, std::span<const std::int32_t> window,
                  Activations<T>& act) {
  const std::size_t n = hp.window_length, d = hp.embedding_dim, k = hp.conv_filter_size, nf = hp.conv_filters,
                    h = hp.lstm_units, nc = hp.classes;
  if (window.size() != n) {
    throw DataError("window has length " + std::to_string(window.size()) + ", model expects " + std::to_string(n));
  }
  const std::size_t pad = (k - 1) / 2;
  const std::size_t m = pooled_length(n);

  act.x.assign((n + k - 1) * d, T(0));
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = window[t];
    if (row < 0 || static_cast<std::size_t>(row) >= hp.vocab_size) {
      throw DataError("window index " + std::to_string(row) + " outside the vocabulary");
    }
    std::copy_n(p.embedding.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(row) * d), d,
                act.x.begin() + static_cast<std::ptrdiff_t>((t + pad) * d));
  }

  // The receptive field of output t is the contiguous slice x[t*d, (t+k)*d).
  act.conv.resize(n * nf);
  for (std::size_t t = 0; t < n; ++t) {
    T* out = act.conv.data() + t * nf;
    detail::gemv(p.conv_kernel.data(), nf, k * d, act.x.data() + t * d, out);
    for (std::size_t f = 0; f < nf; ++f) out[f] += p.conv_bias[f];
  }
  detail::require_finite<T>(act.conv, "convolution");

  act.pooled.resize(m * nf);
  act.pool_src.resize(m * nf);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = 2 * i, b = 2 * i + 1;
    for (std::size_t f = 0; f < nf; ++f) {
      std::size_t src = a;
      if (b < n && act.conv[b * nf + f] > act.conv[a * nf + f]) src = b;
      act.pooled[i * nf + f] = act.conv[src * nf + f];
      act.pool_src[i * nf + f] = static_cast<std::uint32_t>(src);
    }
  }

  act.gates.resize(m * 4 * h);
  act.cell.resize(m * h);
  act.cell_tanh.resize(m * h);
  act.hidden.resize(m * h);
  std::vector<T> recurrent(4 * h);
  for (std::size_t s = 0; s < m; ++s) {
    T* z = act.gates.data() + s * 4 * h;
    detail::gemv(p.lstm_input.data(), 4 * h, nf, act.pooled.data() + s * nf, z);
    if (s > 0) {
      detail::gemv(p.lstm_recurrent.data(), 4 * h, h, act.hidden.data() + (s - 1) * h, recurrent.data());
      for (std::size_t j = 0; j < 4 * h; ++j) z[j] += recurrent[j];
    }
    for (std::size_t j = 0; j < 4 * h; ++j) z[j] += p.lstm_bias[j];
    T* c = act.cell.data() + s * h;
    T* ct = act.cell_tanh.data() + s * h;
    T* hs = act.hidden.data() + s * h;
    const T* c_prev = s > 0 ? act.cell.data() + (s - 1) * h : nullptr;
    for (std::size_t j = 0; j < h; ++j) {
      const T ig = detail::sigmoid(z[j]);
      const T fg = detail::sigmoid(z[h + j]);
      const T gg = std::tanh(z[2 * h + j]);
      const T og = detail::sigmoid(z[3 * h + j]);
      z[j] = ig;
      z[h + j] = fg;
      z[2 * h + j] = gg;
      z[3 * h + j] = og;
      c[j] = (c_prev ? fg * c_prev[j] : T(0)) + ig * gg;
      ct[j] = std::tanh(c[j]);
      hs[j] = og * ct[j];
    }
  }
  detail::require_finite<T>(act.hidden, "lstm");

  act.dense.resize(nc);
  const T* h_last = act.hidden.data() + (m - 1) * h;
  detail::gemv(p.dense_weight.data(), nc, h, h_last, act.dense.data());
  for (std::size_t c = 0; c < nc; ++c) act.dense[c] = std::tanh(act.dense[c] + p.dense_bias[c]);
  detail::require_finite<T>(act.dense, "dense");

  double mx = static_cast<double>(act.dense[0]);
  for (std::size_t c = 1; c < nc; ++c) mx = std::max(mx, static_cast<double>(act.dense[c]));
  double total = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    act.probs[c] = std::exp(static_cast<double>(act.dense[c]) - mx);
    total += act.probs[c];
  }
  for (std::size_t c = 0; c < nc; ++c) act.probs[c] /= total;
  for (std::size_t c = 0; c < nc; ++c) {
    if (!std::isfinite(act.probs[c])) throw NumericalError("non-finite activation in layer softmax");
  }
}

// Cross-entropy loss of the activations against `gold`.
template <typename T>
double loss_of(const Activations<T>& act, int gold) {
  return -std::log(act.probs[static_cast<std::size_t>(gold)]);
}

// Scratch buffers for backward_pass, reusable across calls.
template <typename T>
struct BackwardWorkspace {
  std::vector<T> d_dense, d_hidden, d_hidden_next, d_cell, d_gates, d_pooled, d_conv, d_x;
};

// Accumulates d(loss)/d(parameters) for one example into `grads`.
template <typename T>
void backward_pass(const Parameters<T>& p, const Hyperparameters& hp, std::span<const std::int32_t> window,
                   const Activations<T>& act, int gold, Gradients<T>& grads, BackwardWorkspace<T>& ws) {
  const std::size_t n = hp.window_length, d = hp.embedding_dim, k = hp.conv_filter_size, nf = hp.conv_filters,
                    h = hp.lstm_units, nc = hp.classes;
  const std::size_t pad = (k - 1) / 2;
  const std::size_t m = pooled_length(n);
  auto& g = grads.d;

  // Softmax + cross-entropy, then tanh.
  ws.d_dense.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const double dl = act.probs[c] - (static_cast<int>(c) == gold ? 1.0 : 0.0);
    ws.d_dense[c] = static_cast<T>(dl) * (T(1) - act.dense[c] * act.dense[c]);
  }
  const T* h_last = act.hidden.data() + (m - 1) * h;
  detail::ger_acc(g.dense_weight.data(), nc, h, ws.d_dense.data(), h_last);
  for (std::size_t c = 0; c < nc; ++c) g.dense_bias[c] += ws.d_dense[c];
  ws.d_hidden.assign(h, T(0));
  detail::gemv_t_acc(p.dense_weight.data(), nc, h, ws.d_dense.data(), ws.d_hidden.data());

  // Backpropagation through time.
  ws.d_cell.assign(h, T(0));
  ws.d_gates.resize(4 * h);
  ws.d_pooled.assign(m * nf, T(0));
  ws.d_hidden_next.resize(h);
  for (std::size_t s = m; s-- > 0;) {
    const T* gate = act.gates.data() + s * 4 * h;
    const T* ct = act.cell_tanh.data() + s * h;
    const T* c_prev = s > 0 ? act.cell.data() + (s - 1) * h : nullptr;
    T* dz = ws.d_gates.data();
    for (std::size_t j = 0; j < h; ++j) {
      const T ig = gate[j], fg = gate[h + j], gg = gate[2 * h + j], og = gate[3 * h + j];
      const T dh = ws.d_hidden[j];
      const T dc = ws.d_cell[j] + dh * og * (T(1) - ct[j] * ct[j]);
      dz[j] = dc * gg * ig * (T(1) - ig);
      dz[h + j] = (c_prev ? dc * c_prev[j] : T(0)) * fg * (T(1) - fg);
      dz[2 * h + j] = dc * ig * (T(1) - gg * gg);
      dz[3 * h + j] = dh * ct[j] * og * (T(1) - og);
      ws.d_cell[j] = dc * fg;
    }
    detail::ger_acc(g.lstm_input.data(), 4 * h, nf, dz, act.pooled.data() + s * nf);
    for (std::size_t j = 0; j < 4 * h; ++j) g.lstm_bias[j] += dz[j];
    detail::gemv_t_acc(p.lstm_input.data(), 4 * h, nf, dz, ws.d_pooled.data() + s * nf);
    std::fill(ws.d_hidden_next.begin(), ws.d_hidden_next.end(), T(0));
    if (s > 0) {
      detail::ger_acc(g.lstm_recurrent.data(), 4 * h, h, dz, act.hidden.data() + (s - 1) * h);
      detail::gemv_t_acc(p.lstm_recurrent.data(), 4 * h, h, dz, ws.d_hidden_next.data());
    }
    std::swap(ws.d_hidden, ws.d_hidden_next);
  }

  ws.d_conv.assign(n * nf, T(0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t f = 0; f < nf; ++f) {
      ws.d_conv[act.pool_src[i * nf + f] * nf + f] += ws.d_pooled[i * nf + f];
    }
  }

  ws.d_x.assign((n + k - 1) * d, T(0));
  for (std::size_t t = 0; t < n; ++t) {
    const T* dy = ws.d_conv.data() + t * nf;
    detail::ger_acc(g.conv_kernel.data(), nf, k * d, dy, act.x.data() + t * d);
    for (std::size_t f = 0; f < nf; ++f) g.conv_bias[f] += dy[f];
    detail::gemv_t_acc(p.conv_kernel.data(), nf, k * d, dy, ws.d_x.data() + t * d);
  }
  for (T v : ws.d_x) {
    if (!std::isfinite(v)) throw NumericalError("non-finite gradient in layer convolution");
  }

  for (std::size_t t = 0; t < n; ++t) {
    const auto row = static_cast<std::size_t>(window[t]);
    detail::axpy(T(1), ws.d_x.data() + (t + pad) * d, g.embedding.data() + row * d, d);
    if (!grads.touched_mask[row]) {
      grads.touched_mask[row] = 1;
      grads.touched_rows.push_back(static_cast<std::int32_t>(row));
    }
  }
}

}  // namespace morphgen
