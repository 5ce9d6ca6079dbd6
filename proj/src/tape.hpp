// Copyright (c) 2026 The tshn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rng.hpp"
#include "tensor.hpp"

namespace tshn::nn {

// Reverse-mode tape. Each op records its output value and a closure that
// scatters the output gradient into its parents. backward() replays the
// recorded nodes from the loss down; nodes that never received gradient
// are skipped, so parameters off the loss path keep exactly-zero grads.
template <typename T>
class Tape {
 public:
  using BackFn = std::function<void(Tape&, int)>;

  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    BackFn back;
    bool has_grad = false;
  };

  int push(Tensor<T> value, BackFn back = nullptr) {
    Node n;
    n.grad = Tensor<T>(value.shape);
    n.value = std::move(value);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int leaf(Tensor<T> value) { return push(std::move(value)); }

  Tensor<T>& val(int id) { return nodes_[static_cast<size_t>(id)].value; }
  const Tensor<T>& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  Tensor<T>& grad(int id) { return nodes_[static_cast<size_t>(id)].grad; }

  void add_grad(int id, size_t offset, T g) {
    Node& n = nodes_[static_cast<size_t>(id)];
    n.grad.data[offset] += g;
    n.has_grad = true;
  }

  Tensor<T>& grad_sink(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    n.has_grad = true;
    return n.grad;
  }

  size_t size() const { return nodes_.size(); }

  // Backpropagate from a recorded scalar node.
  void backward(int loss_id) {
    if (nodes_.empty() || loss_id < 0 || loss_id >= static_cast<int>(nodes_.size()))
      fail(ErrorCode::GraphError, "backward called without a recorded forward computation");
    Node& loss = nodes_[static_cast<size_t>(loss_id)];
    if (loss.value.numel() != 1)
      fail(ErrorCode::GraphError, "backward target must be a scalar node");
    loss.grad.data[0] = T(1);
    loss.has_grad = true;
    for (int i = loss_id; i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (n.has_grad && n.back) n.back(*this, i);
    }
  }

  void clear() { nodes_.clear(); }

 private:
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Ops. All shapes are checked up front; outputs are scanned for non-finite
// values so a diverging computation faults at the op that produced it.
// ---------------------------------------------------------------------------

// x: (B, C, H, W), w: (OC, C, KH, KW), b: (OC). Valid convolution, stride 1.
template <typename T>
int conv2d(Tape<T>& tape, int x_id, int w_id, int b_id) {
  const Tensor<T>& x = tape.val(x_id);
  const Tensor<T>& w = tape.val(w_id);
  const Tensor<T>& b = tape.val(b_id);
  if (x.shape.size() != 4 || w.shape.size() != 4 || b.shape.size() != 1)
    fail(ErrorCode::ShapeError, "conv2d expects x(B,C,H,W), w(OC,C,KH,KW), b(OC)");
  const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int OC = w.dim(0), KH = w.dim(2), KW = w.dim(3);
  if (w.dim(1) != C || b.dim(0) != OC)
    fail(ErrorCode::ShapeError, "conv2d channel mismatch: x " + x.shape_str() + " w " + w.shape_str());
  const int OH = H - KH + 1, OW = W - KW + 1;
  if (OH <= 0 || OW <= 0) fail(ErrorCode::ShapeError, "conv2d kernel larger than input");

  Tensor<T> y({B, OC, OH, OW});
  const T* xd = x.data.data();
  const T* wd = w.data.data();
  T* yd = y.data.data();
  for (int n = 0; n < B; ++n) {
    for (int oc = 0; oc < OC; ++oc) {
      T* yrow = yd + ((static_cast<size_t>(n) * OC + oc) * OH) * OW;
      const T bias = b.data[static_cast<size_t>(oc)];
      for (int i = 0; i < OH * OW; ++i) yrow[i] = bias;
      for (int c = 0; c < C; ++c) {
        for (int kh = 0; kh < KH; ++kh) {
          for (int kw = 0; kw < KW; ++kw) {
            const T wv = wd[((static_cast<size_t>(oc) * C + c) * KH + kh) * KW + kw];
            for (int oh = 0; oh < OH; ++oh) {
              const T* xrow = xd + ((static_cast<size_t>(n) * C + c) * H + oh + kh) * W + kw;
              T* yr = yrow + static_cast<size_t>(oh) * OW;
              for (int ow = 0; ow < OW; ++ow) yr[ow] += wv * xrow[ow];
            }
          }
        }
      }
    }
  }
  ensure_finite(y, "conv2d");

  auto back = [x_id, w_id, b_id, B, C, H, W, OC, KH, KW, OH, OW](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    const Tensor<T>& xv = tp.val(x_id);
    const Tensor<T>& wv = tp.val(w_id);
    Tensor<T>& gx = tp.grad_sink(x_id);
    Tensor<T>& gw = tp.grad_sink(w_id);
    Tensor<T>& gb = tp.grad_sink(b_id);
    const T* gyd = gy.data.data();
    for (int n = 0; n < B; ++n) {
      for (int oc = 0; oc < OC; ++oc) {
        const T* gyrow = gyd + ((static_cast<size_t>(n) * OC + oc) * OH) * OW;
        T gbias = T(0);
        for (int i = 0; i < OH * OW; ++i) gbias += gyrow[i];
        gb.data[static_cast<size_t>(oc)] += gbias;
        for (int c = 0; c < C; ++c) {
          for (int kh = 0; kh < KH; ++kh) {
            for (int kw = 0; kw < KW; ++kw) {
              const size_t widx = ((static_cast<size_t>(oc) * C + c) * KH + kh) * KW + kw;
              const T wval = wv.data[widx];
              T gwacc = T(0);
              for (int oh = 0; oh < OH; ++oh) {
                const size_t xoff = ((static_cast<size_t>(n) * C + c) * H + oh + kh) * W + kw;
                const T* gyr = gyrow + static_cast<size_t>(oh) * OW;
                const T* xr = xv.data.data() + xoff;
                T* gxr = gx.data.data() + xoff;
                for (int ow = 0; ow < OW; ++ow) {
                  gwacc += gyr[ow] * xr[ow];
                  gxr[ow] += gyr[ow] * wval;
                }
              }
              gw.data[widx] += gwacc;
            }
          }
        }
      }
    }
  };
  return tape.push(std::move(y), back);
}

// x: (B, I), w: (O, I), b: (O) -> (B, O)
template <typename T>
int dense(Tape<T>& tape, int x_id, int w_id, int b_id) {
  const Tensor<T>& x = tape.val(x_id);
  const Tensor<T>& w = tape.val(w_id);
  const Tensor<T>& b = tape.val(b_id);
  if (x.shape.size() != 2 || w.shape.size() != 2 || b.shape.size() != 1 || w.dim(1) != x.dim(1) ||
      b.dim(0) != w.dim(0))
    fail(ErrorCode::ShapeError, "dense shape mismatch: x " + x.shape_str() + " w " + w.shape_str());
  const int B = x.dim(0), I = x.dim(1), O = w.dim(0);
  Tensor<T> y({B, O});
  for (int n = 0; n < B; ++n) {
    const T* xr = x.data.data() + static_cast<size_t>(n) * I;
    T* yr = y.data.data() + static_cast<size_t>(n) * O;
    for (int o = 0; o < O; ++o) {
      const T* wr = w.data.data() + static_cast<size_t>(o) * I;
      T acc = b.data[static_cast<size_t>(o)];
      for (int i = 0; i < I; ++i) acc += xr[i] * wr[i];
      yr[o] = acc;
    }
  }
  ensure_finite(y, "dense");

  auto back = [x_id, w_id, b_id, B, I, O](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    const Tensor<T>& xv = tp.val(x_id);
    const Tensor<T>& wv = tp.val(w_id);
    Tensor<T>& gx = tp.grad_sink(x_id);
    Tensor<T>& gw = tp.grad_sink(w_id);
    Tensor<T>& gb = tp.grad_sink(b_id);
    for (int n = 0; n < B; ++n) {
      const T* gyr = gy.data.data() + static_cast<size_t>(n) * O;
      const T* xr = xv.data.data() + static_cast<size_t>(n) * I;
      T* gxr = gx.data.data() + static_cast<size_t>(n) * I;
      for (int o = 0; o < O; ++o) {
        const T g = gyr[o];
        if (g == T(0)) continue;
        const T* wr = wv.data.data() + static_cast<size_t>(o) * I;
        T* gwr = gw.data.data() + static_cast<size_t>(o) * I;
        for (int i = 0; i < I; ++i) {
          gxr[i] += g * wr[i];
          gwr[i] += g * xr[i];
        }
        gb.data[static_cast<size_t>(o)] += g;
      }
    }
  };
  return tape.push(std::move(y), back);
}

template <typename T>
int relu(Tape<T>& tape, int x_id) {
  const Tensor<T>& x = tape.val(x_id);
  Tensor<T> y(x.shape);
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  auto back = [x_id](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    const Tensor<T>& xv = tp.val(x_id);
    Tensor<T>& gx = tp.grad_sink(x_id);
    for (size_t i = 0; i < gy.data.size(); ++i)
      if (xv.data[i] > T(0)) gx.data[i] += gy.data[i];
  };
  return tape.push(std::move(y), back);
}

// Inverted dropout: kept activations are scaled by 1/(1-rate) so the
// expectation matches eval mode. In eval mode this op is not recorded.
template <typename T>
int dropout(Tape<T>& tape, int x_id, double rate, Rng& rng) {
  const Tensor<T>& x = tape.val(x_id);
  std::vector<T> mask(x.data.size());
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  for (size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(rate) ? T(0) : keep_scale;
  Tensor<T> y(x.shape);
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] * mask[i];
  auto back = [x_id, mask = std::move(mask)](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gx = tp.grad_sink(x_id);
    for (size_t i = 0; i < gy.data.size(); ++i) gx.data[i] += gy.data[i] * mask[i];
  };
  return tape.push(std::move(y), back);
}

// (B, C, H, W) -> (B, C*H*W)
template <typename T>
int flatten(Tape<T>& tape, int x_id) {
  const Tensor<T>& x = tape.val(x_id);
  if (x.shape.empty()) fail(ErrorCode::ShapeError, "flatten on scalar");
  const int B = x.dim(0);
  const int rest = static_cast<int>(x.numel() / B);
  Tensor<T> y({B, rest}, x.data);
  auto back = [x_id](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gx = tp.grad_sink(x_id);
    for (size_t i = 0; i < gy.data.size(); ++i) gx.data[i] += gy.data[i];
  };
  return tape.push(std::move(y), back);
}

namespace detail {

// Row softmax of logits into probs; returns per-row logsumexp.
template <typename T>
void softmax_rows(const Tensor<T>& logits, std::vector<T>& probs, std::vector<T>& lse) {
  const int B = logits.dim(0), N = logits.dim(1);
  probs.resize(static_cast<size_t>(B) * N);
  lse.resize(static_cast<size_t>(B));
  for (int n = 0; n < B; ++n) {
    const T* l = logits.data.data() + static_cast<size_t>(n) * N;
    T m = l[0];
    for (int j = 1; j < N; ++j) m = std::max(m, l[j]);
    T s = T(0);
    for (int j = 0; j < N; ++j) s += std::exp(l[j] - m);
    const T ls = m + std::log(s);
    lse[static_cast<size_t>(n)] = ls;
    T* p = probs.data() + static_cast<size_t>(n) * N;
    for (int j = 0; j < N; ++j) p[j] = std::exp(l[j] - ls);
  }
}

template <typename T>
void check_labels(const Tensor<T>& logits, const std::vector<int>& labels) {
  if (logits.shape.size() != 2) fail(ErrorCode::ShapeError, "loss expects logits (B,N)");
  if (static_cast<int>(labels.size()) != logits.dim(0))
    fail(ErrorCode::ShapeError, "label count does not match batch");
  for (int y : labels)
    if (y < 0 || y >= logits.dim(1)) fail(ErrorCode::ShapeError, "label out of range");
}

}  // namespace detail

// Per-sample cross-entropy: loss_n = logsumexp(l_n) - l_n[y_n]. Output (B).
template <typename T>
int softmax_ce(Tape<T>& tape, int logits_id, const std::vector<int>& labels) {
  const Tensor<T>& logits = tape.val(logits_id);
  detail::check_labels(logits, labels);
  const int B = logits.dim(0), N = logits.dim(1);
  std::vector<T> probs, lse;
  detail::softmax_rows(logits, probs, lse);
  Tensor<T> y({B});
  for (int n = 0; n < B; ++n)
    y.data[static_cast<size_t>(n)] = lse[static_cast<size_t>(n)] -
                                     logits.data[static_cast<size_t>(n) * N + labels[static_cast<size_t>(n)]];
  ensure_finite(y, "softmax_ce");
  auto back = [logits_id, labels, probs = std::move(probs), B, N](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gl = tp.grad_sink(logits_id);
    for (int n = 0; n < B; ++n) {
      const T g = gy.data[static_cast<size_t>(n)];
      if (g == T(0)) continue;
      const T* p = probs.data() + static_cast<size_t>(n) * N;
      T* gr = gl.data.data() + static_cast<size_t>(n) * N;
      for (int j = 0; j < N; ++j) gr[j] += g * p[j];
      gr[labels[static_cast<size_t>(n)]] -= g;
    }
  };
  return tape.push(std::move(y), back);
}

// Label-smoothed cross-entropy, per sample:
//   (1-eps) * ce(target) + (eps/N) * sum_c ce(c)
// which equals lse - (1-eps) l_target - (eps/N) sum_c l_c.
template <typename T>
int smoothed_ce(Tape<T>& tape, int logits_id, const std::vector<int>& labels, double eps) {
  const Tensor<T>& logits = tape.val(logits_id);
  detail::check_labels(logits, labels);
  const int B = logits.dim(0), N = logits.dim(1);
  std::vector<T> probs, lse;
  detail::softmax_rows(logits, probs, lse);
  Tensor<T> y({B});
  const T e = static_cast<T>(eps);
  for (int n = 0; n < B; ++n) {
    const T* l = logits.data.data() + static_cast<size_t>(n) * N;
    T mean_l = T(0);
    for (int j = 0; j < N; ++j) mean_l += l[j];
    mean_l /= static_cast<T>(N);
    y.data[static_cast<size_t>(n)] =
        lse[static_cast<size_t>(n)] - (T(1) - e) * l[labels[static_cast<size_t>(n)]] - e * mean_l;
  }
  ensure_finite(y, "smoothed_ce");
  auto back = [logits_id, labels, probs = std::move(probs), B, N, e](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gl = tp.grad_sink(logits_id);
    const T uniform = e / static_cast<T>(N);
    for (int n = 0; n < B; ++n) {
      const T g = gy.data[static_cast<size_t>(n)];
      if (g == T(0)) continue;
      const T* p = probs.data() + static_cast<size_t>(n) * N;
      T* gr = gl.data.data() + static_cast<size_t>(n) * N;
      for (int j = 0; j < N; ++j) gr[j] += g * (p[j] - uniform);
      gr[labels[static_cast<size_t>(n)]] -= g * (T(1) - e);
    }
  };
  return tape.push(std::move(y), back);
}

// Forward-corrected cross-entropy through a row-stochastic transition matrix:
//   loss_n = -log sum_j C[j][k_n] p_n[j]
// The mixed probability is clamped at 1e-12; clamp events are counted and the
// clamped sample contributes zero gradient.
template <typename T>
int forward_corrected_ce(Tape<T>& tape, int logits_id, const std::vector<int>& labels,
                         const std::vector<std::vector<double>>& transition,
                         int64_t* clamp_counter = nullptr) {
  const Tensor<T>& logits = tape.val(logits_id);
  detail::check_labels(logits, labels);
  const int B = logits.dim(0), N = logits.dim(1);
  if (static_cast<int>(transition.size()) != N)
    fail(ErrorCode::ShapeError, "transition matrix does not match class count");
  std::vector<T> probs, lse;
  detail::softmax_rows(logits, probs, lse);
  Tensor<T> y({B});
  std::vector<T> mixed(static_cast<size_t>(B));
  constexpr double kFloor = 1e-12;
  for (int n = 0; n < B; ++n) {
    const int k = labels[static_cast<size_t>(n)];
    const T* p = probs.data() + static_cast<size_t>(n) * N;
    double m = 0.0;
    for (int j = 0; j < N; ++j) m += transition[static_cast<size_t>(j)][static_cast<size_t>(k)] *
                                     static_cast<double>(p[j]);
    if (m < kFloor) {
      m = kFloor;
      if (clamp_counter) ++*clamp_counter;
      mixed[static_cast<size_t>(n)] = T(0);  // flag: no gradient
    } else {
      mixed[static_cast<size_t>(n)] = static_cast<T>(m);
    }
    y.data[static_cast<size_t>(n)] = static_cast<T>(-std::log(m));
  }
  ensure_finite(y, "forward_corrected_ce");
  auto back = [logits_id, labels, probs = std::move(probs), mixed = std::move(mixed), transition,
               B, N](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gl = tp.grad_sink(logits_id);
    for (int n = 0; n < B; ++n) {
      const T g = gy.data[static_cast<size_t>(n)];
      const T m = mixed[static_cast<size_t>(n)];
      if (g == T(0) || m == T(0)) continue;
      const int k = labels[static_cast<size_t>(n)];
      const T* p = probs.data() + static_cast<size_t>(n) * N;
      T* gr = gl.data.data() + static_cast<size_t>(n) * N;
      // dL/dp_j = -C[j][k] / m ; softmax VJP: dL/dl_i = p_i (dL/dp_i - sum_j dL/dp_j p_j)
      T dot = T(0);
      for (int j = 0; j < N; ++j)
        dot += static_cast<T>(-transition[static_cast<size_t>(j)][static_cast<size_t>(k)]) / m * p[j];
      for (int i = 0; i < N; ++i) {
        const T dpi = static_cast<T>(-transition[static_cast<size_t>(i)][static_cast<size_t>(k)]) / m;
        gr[i] += g * p[i] * (dpi - dot);
      }
    }
  };
  return tape.push(std::move(y), back);
}

// Mean absolute error between softmax probabilities and the one-hot target,
// per sample: sum_c |p_c - y_c|.
template <typename T>
int mae_loss(Tape<T>& tape, int logits_id, const std::vector<int>& labels) {
  const Tensor<T>& logits = tape.val(logits_id);
  detail::check_labels(logits, labels);
  const int B = logits.dim(0), N = logits.dim(1);
  std::vector<T> probs, lse;
  detail::softmax_rows(logits, probs, lse);
  Tensor<T> y({B});
  for (int n = 0; n < B; ++n) {
    const int t = labels[static_cast<size_t>(n)];
    const T* p = probs.data() + static_cast<size_t>(n) * N;
    T acc = T(0);
    for (int j = 0; j < N; ++j) acc += std::abs(p[j] - (j == t ? T(1) : T(0)));
    y.data[static_cast<size_t>(n)] = acc;
  }
  ensure_finite(y, "mae_loss");
  auto back = [logits_id, labels, probs = std::move(probs), B, N](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gl = tp.grad_sink(logits_id);
    for (int n = 0; n < B; ++n) {
      const T g = gy.data[static_cast<size_t>(n)];
      if (g == T(0)) continue;
      const int t = labels[static_cast<size_t>(n)];
      const T* p = probs.data() + static_cast<size_t>(n) * N;
      T* gr = gl.data.data() + static_cast<size_t>(n) * N;
      T dot = T(0);
      for (int j = 0; j < N; ++j) {
        const T s = (p[j] - (j == t ? T(1) : T(0))) >= T(0) ? T(1) : T(-1);
        dot += s * p[j];
      }
      for (int i = 0; i < N; ++i) {
        const T s = (p[i] - (i == t ? T(1) : T(0))) >= T(0) ? T(1) : T(-1);
        gr[i] += g * p[i] * (s - dot);
      }
    }
  };
  return tape.push(std::move(y), back);
}

// Generalized cross-entropy, per sample: (1 - p_target^q) / q, q in (0, 1].
template <typename T>
int gce_loss(Tape<T>& tape, int logits_id, const std::vector<int>& labels, double q) {
  const Tensor<T>& logits = tape.val(logits_id);
  detail::check_labels(logits, labels);
  if (q <= 0.0 || q > 1.0) fail(ErrorCode::ConfigError, "GCE q must be in (0,1]");
  const int B = logits.dim(0), N = logits.dim(1);
  std::vector<T> probs, lse;
  detail::softmax_rows(logits, probs, lse);
  Tensor<T> y({B});
  const T tq = static_cast<T>(q);
  for (int n = 0; n < B; ++n) {
    const T pt = probs[static_cast<size_t>(n) * N + labels[static_cast<size_t>(n)]];
    y.data[static_cast<size_t>(n)] = (T(1) - std::pow(pt, tq)) / tq;
  }
  ensure_finite(y, "gce_loss");
  auto back = [logits_id, labels, probs = std::move(probs), B, N, tq](Tape<T>& tp, int self) {
    const Tensor<T>& gy = tp.grad(self);
    Tensor<T>& gl = tp.grad_sink(logits_id);
    for (int n = 0; n < B; ++n) {
      const T g = gy.data[static_cast<size_t>(n)];
      if (g == T(0)) continue;
      const int t = labels[static_cast<size_t>(n)];
      const T* p = probs.data() + static_cast<size_t>(n) * N;
      const T ptq = std::pow(p[t], tq);  // dL/dl_i = -p_t^q (1{i=t} - p_i)
      T* gr = gl.data.data() + static_cast<size_t>(n) * N;
      for (int i = 0; i < N; ++i) gr[i] += g * -ptq * ((i == t ? T(1) : T(0)) - p[i]);
    }
  };
  return tape.push(std::move(y), back);
}

// Cosine similarity of two nonzero vectors -> scalar in [-1, 1].
template <typename T>
int cosine_similarity(Tape<T>& tape, int a_id, int b_id) {
  const Tensor<T>& a = tape.val(a_id);
  const Tensor<T>& b = tape.val(b_id);
  if (a.shape != b.shape || a.shape.size() != 1)
    fail(ErrorCode::ShapeError, "cosine_similarity expects two equal-length vectors");
  T dot = T(0), na2 = T(0), nb2 = T(0);
  for (size_t i = 0; i < a.data.size(); ++i) {
    dot += a.data[i] * b.data[i];
    na2 += a.data[i] * a.data[i];
    nb2 += b.data[i] * b.data[i];
  }
  if (na2 == T(0) || nb2 == T(0))
    fail(ErrorCode::DegenerateVector, "cosine_similarity of a zero vector");
  const T na = std::sqrt(na2), nb = std::sqrt(nb2);
  const T c = dot / (na * nb);
  Tensor<T> y({1});
  y.data[0] = c;
  auto back = [a_id, b_id, na, nb, c](Tape<T>& tp, int self) {
    const T g = tp.grad(self).data[0];
    if (g == T(0)) return;
    const Tensor<T>& av = tp.val(a_id);
    const Tensor<T>& bv = tp.val(b_id);
    Tensor<T>& ga = tp.grad_sink(a_id);
    Tensor<T>& gb = tp.grad_sink(b_id);
    for (size_t i = 0; i < av.data.size(); ++i) {
      ga.data[i] += g * (bv.data[i] / (na * nb) - c * av.data[i] / (na * na));
      gb.data[i] += g * (av.data[i] / (na * nb) - c * bv.data[i] / (nb * nb));
    }
  };
  return tape.push(std::move(y), back);
}

// sum_n w_n x_n over a vector node, with constant weights -> scalar.
template <typename T>
int weighted_sum(Tape<T>& tape, int x_id, std::vector<double> weights) {
  const Tensor<T>& x = tape.val(x_id);
  if (x.shape.size() != 1 || x.data.size() != weights.size())
    fail(ErrorCode::ShapeError, "weighted_sum expects matching vector and weights");
  T acc = T(0);
  for (size_t i = 0; i < x.data.size(); ++i) acc += static_cast<T>(weights[i]) * x.data[i];
  Tensor<T> y({1});
  y.data[0] = acc;
  ensure_finite(y, "weighted_sum");
  auto back = [x_id, weights = std::move(weights)](Tape<T>& tp, int self) {
    const T g = tp.grad(self).data[0];
    Tensor<T>& gx = tp.grad_sink(x_id);
    for (size_t i = 0; i < weights.size(); ++i) gx.data[i] += g * static_cast<T>(weights[i]);
  };
  return tape.push(std::move(y), back);
}

template <typename T>
int sum_all(Tape<T>& tape, int x_id) {
  const Tensor<T>& x = tape.val(x_id);
  T acc = T(0);
  for (const T& v : x.data) acc += v;
  Tensor<T> y({1});
  y.data[0] = acc;
  ensure_finite(y, "sum_all");
  auto back = [x_id](Tape<T>& tp, int self) {
    const T g = tp.grad(self).data[0];
    Tensor<T>& gx = tp.grad_sink(x_id);
    for (T& v : gx.data) v += g;
  };
  return tape.push(std::move(y), back);
}

template <typename T>
int mean_all(Tape<T>& tape, int x_id) {
  const Tensor<T>& x = tape.val(x_id);
  const T inv = T(1) / static_cast<T>(x.numel());
  T acc = T(0);
  for (const T& v : x.data) acc += v;
  Tensor<T> y({1});
  y.data[0] = acc * inv;
  ensure_finite(y, "mean_all");
  auto back = [x_id, inv](Tape<T>& tp, int self) {
    const T g = tp.grad(self).data[0] * inv;
    Tensor<T>& gx = tp.grad_sink(x_id);
    for (T& v : gx.data) v += g;
  };
  return tape.push(std::move(y), back);
}

// k1*a + k2*b for scalar nodes.
template <typename T>
int axpby(Tape<T>& tape, double k1, int a_id, double k2, int b_id) {
  const Tensor<T>& a = tape.val(a_id);
  const Tensor<T>& b = tape.val(b_id);
  if (a.numel() != 1 || b.numel() != 1) fail(ErrorCode::ShapeError, "axpby expects scalars");
  Tensor<T> y({1});
  y.data[0] = static_cast<T>(k1) * a.data[0] + static_cast<T>(k2) * b.data[0];
  ensure_finite(y, "axpby");
  auto back = [a_id, b_id, k1, k2](Tape<T>& tp, int self) {
    const T g = tp.grad(self).data[0];
    tp.add_grad(a_id, 0, g * static_cast<T>(k1));
    tp.add_grad(b_id, 0, g * static_cast<T>(k2));
  };
  return tape.push(std::move(y), back);
}

template <typename T>
int scale(Tape<T>& tape, int x_id, double k) {
  const Tensor<T>& x = tape.val(x_id);
  if (x.numel() != 1) fail(ErrorCode::ShapeError, "scale expects a scalar node");
  Tensor<T> y({1});
  y.data[0] = x.data[0] * static_cast<T>(k);
  ensure_finite(y, "scale");
  auto back = [x_id, k](Tape<T>& tp, int self) {
    tp.add_grad(x_id, 0, tp.grad(self).data[0] * static_cast<T>(k));
  };
  return tape.push(std::move(y), back);
}

// Value-only helper: row softmax without a tape (evaluation paths).
template <typename T>
inline std::vector<double> softmax_row(const T* logits, int n) {
  double m = static_cast<double>(logits[0]);
  for (int j = 1; j < n; ++j) m = std::max(m, static_cast<double>(logits[j]));
  double s = 0.0;
  std::vector<double> p(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    p[static_cast<size_t>(j)] = std::exp(static_cast<double>(logits[j]) - m);
    s += p[static_cast<size_t>(j)];
  }
  for (double& v : p) v /= s;
  return p;
}

}  // namespace tshn::nn
