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

#include <optional>
#include <string>
#include <vector>

#include "tape.hpp"

namespace tshn::nn {

// Two-conv embedding over the 2xL IQ plane with a feature head and a
// classifier head. Teacher and student share one parameter store; the
// prototype metric head is nonparametric (cosine against the bank).
struct NetConfig {
  int n_classes = 0;
  int sample_len = 128;
  int conv1_filters = 32;  // kernel 1x3
  int conv2_filters = 16;  // kernel 2x3
  int feat_dim = 64;
  double dropout = 0.5;

  static NetConfig desk(int n_classes, int sample_len = 128) {
    NetConfig c;
    c.n_classes = n_classes;
    c.sample_len = sample_len;
    return c;
  }
  // Full-size preset; shape follows the classic two-conv AMC network.
  static NetConfig paper(int n_classes, int sample_len = 128) {
    NetConfig c;
    c.n_classes = n_classes;
    c.sample_len = sample_len;
    c.conv1_filters = 256;
    c.conv2_filters = 80;
    c.feat_dim = 256;
    return c;
  }
  int flat_dim() const { return conv2_filters * (sample_len - 4); }
};

template <typename T>
struct Embedding {
  NetConfig cfg;
  Tensor<T> c1w, c1b, c2w, c2b, fw, fb, ow, ob;

  explicit Embedding(const NetConfig& c = NetConfig{}) : cfg(c) {
    if (c.n_classes > 0) allocate();
  }

  void allocate() {
    c1w = Tensor<T>({cfg.conv1_filters, 1, 1, 3});
    c1b = Tensor<T>({cfg.conv1_filters});
    c2w = Tensor<T>({cfg.conv2_filters, cfg.conv1_filters, 2, 3});
    c2b = Tensor<T>({cfg.conv2_filters});
    fw = Tensor<T>({cfg.feat_dim, cfg.flat_dim()});
    fb = Tensor<T>({cfg.feat_dim});
    ow = Tensor<T>({cfg.n_classes, cfg.feat_dim});
    ob = Tensor<T>({cfg.n_classes});
  }

  // Uniform fan-in init, biases zero.
  void init(uint64_t seed) {
    Rng rng(mix_seed(seed));
    auto fill = [&rng](Tensor<T>& w, int fan_in) {
      const double bound = std::sqrt(1.0 / fan_in);
      for (T& v : w.data) v = static_cast<T>(rng.uniform(-bound, bound));
    };
    fill(c1w, 1 * 1 * 3);
    fill(c2w, cfg.conv1_filters * 2 * 3);
    fill(fw, cfg.flat_dim());
    fill(ow, cfg.feat_dim);
  }

  std::vector<Tensor<T>*> params() { return {&c1w, &c1b, &c2w, &c2b, &fw, &fb, &ow, &ob}; }
  std::vector<const Tensor<T>*> params() const {
    return {&c1w, &c1b, &c2w, &c2b, &fw, &fb, &ow, &ob};
  }
  static std::vector<std::string> param_names() {
    return {"conv1.w", "conv1.b", "conv2.w", "conv2.b", "feat.w", "feat.b", "out.w", "out.b"};
  }

  struct Bound {
    int c1w, c1b, c2w, c2b, fw, fb, ow, ob;
  };

  Bound bind(Tape<T>& tape) const {
    return Bound{tape.leaf(c1w), tape.leaf(c1b), tape.leaf(c2w), tape.leaf(c2b),
                 tape.leaf(fw),  tape.leaf(fb),  tape.leaf(ow),  tape.leaf(ob)};
  }

  struct Out {
    int features;  // (B, feat_dim)
    int logits;    // (B, n_classes)
  };

  // x: (B, 2, L). Dropout is recorded only in train mode.
  Out forward(Tape<T>& tape, const Bound& p, const Tensor<T>& x, bool train,
              Rng* dropout_rng) const {
    if (x.shape.size() != 3 || x.dim(1) != 2 || x.dim(2) != cfg.sample_len)
      fail(ErrorCode::ShapeError, "expected input (B,2," + std::to_string(cfg.sample_len) +
                                      "), got " + x.shape_str());
    const int B = x.dim(0);
    Tensor<T> x4({B, 1, 2, cfg.sample_len}, x.data);
    int h = tape.leaf(std::move(x4));
    h = conv2d(tape, h, p.c1w, p.c1b);
    h = relu(tape, h);
    if (train && cfg.dropout > 0) h = dropout(tape, h, cfg.dropout, *dropout_rng);
    h = conv2d(tape, h, p.c2w, p.c2b);
    h = relu(tape, h);
    if (train && cfg.dropout > 0) h = dropout(tape, h, cfg.dropout, *dropout_rng);
    h = flatten(tape, h);
    int f = dense(tape, h, p.fw, p.fb);
    f = relu(tape, f);
    int fd = f;
    if (train && cfg.dropout > 0) fd = dropout(tape, f, cfg.dropout, *dropout_rng);
    int logits = dense(tape, fd, p.ow, p.ob);
    return Out{f, logits};
  }

  // Evaluation-mode forward without gradient bookkeeping kept alive.
  void infer(const Tensor<T>& x, Tensor<T>* features, Tensor<T>* logits) const {
    Tape<T> tape;
    Bound p = bind(tape);
    Out out = forward(tape, p, x, /*train=*/false, nullptr);
    if (features) *features = tape.val(out.features);
    if (logits) *logits = tape.val(out.logits);
  }
};

enum class OptKind { Sgd, Adam };

inline const char* opt_kind_name(OptKind k) { return k == OptKind::Sgd ? "sgd" : "adam"; }

template <typename T>
struct Optimizer {
  OptKind kind = OptKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int64_t step_count = 0;
  std::vector<std::vector<T>> m, v;

  static Optimizer sgd(double lr) { return Optimizer{OptKind::Sgd, lr}; }
  static Optimizer adam(double lr) { return Optimizer{OptKind::Adam, lr}; }

  void ensure_state(const std::vector<Tensor<T>*>& params) {
    if (kind != OptKind::Adam || !m.empty()) return;
    for (auto* p : params) {
      m.emplace_back(p->data.size(), T(0));
      v.emplace_back(p->data.size(), T(0));
    }
  }

  void step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads,
            const std::vector<std::string>& names) {
    if (params.size() != grads.size())
      fail(ErrorCode::ShapeError, "optimizer: parameter/gradient count mismatch");
    for (size_t i = 0; i < grads.size(); ++i) {
      for (const T& g : grads[i]->data)
        if (!std::isfinite(static_cast<double>(g)))
          fail(ErrorCode::FaultReport, "non-finite gradient for parameter '" +
                                           (i < names.size() ? names[i] : std::to_string(i)) + "'");
    }
    ensure_state(params);
    ++step_count;
    if (kind == OptKind::Sgd) {
      for (size_t i = 0; i < params.size(); ++i) {
        T* p = params[i]->data.data();
        const T* g = grads[i]->data.data();
        for (size_t j = 0; j < params[i]->data.size(); ++j)
          p[j] -= static_cast<T>(lr) * g[j];
      }
      return;
    }
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    const double alpha = lr * std::sqrt(bc2) / bc1;
    for (size_t i = 0; i < params.size(); ++i) {
      T* p = params[i]->data.data();
      const T* g = grads[i]->data.data();
      T* mi = m[i].data();
      T* vi = v[i].data();
      for (size_t j = 0; j < params[i]->data.size(); ++j) {
        mi[j] = static_cast<T>(beta1) * mi[j] + static_cast<T>(1.0 - beta1) * g[j];
        vi[j] = static_cast<T>(beta2) * vi[j] + static_cast<T>(1.0 - beta2) * g[j] * g[j];
        p[j] -= static_cast<T>(alpha) * mi[j] /
                (std::sqrt(vi[j]) + static_cast<T>(eps));
      }
    }
  }
};

// Versioned checkpoint: header + named little-endian f32 parameter blobs +
// optimizer state. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const Embedding<float>& net,
                     const Optimizer<float>* opt);
struct Checkpoint {
  Embedding<float> net;
  std::optional<Optimizer<float>> opt;
  std::string meta_json;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tshn::nn
