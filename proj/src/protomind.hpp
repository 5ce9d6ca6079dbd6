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

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rng.hpp"
#include "tape.hpp"

namespace tshn::teacher {

// How prototype distance feeds the soft-label softmax: exp(-d) with either
// d = -cos or d = 1 - cos. The two differ by a constant per row, so the
// resulting soft labels coincide; both readings are kept selectable.
enum class DistanceMode { NegCosine, OneMinusCosine };

struct EpisodeSpec {
  int ways = 0;            // 0: use min(11, n_classes)
  int shots = 5;           // I, support per class
  int trusted_query = 15;  // H, query per class
  int untrusted_query = 64;  // W
};

// Dataset indices (not ids) for one episode. Support and trusted query are
// disjoint within the trusted pool; shots/queries shrink per class when a
// class has too few trusted samples, and the shrink is reported.
struct Episode {
  std::vector<int> classes;                  // sampled class labels
  std::vector<size_t> support;               // trusted pool positions
  std::vector<int> support_labels;
  std::vector<size_t> trusted_query;
  std::vector<int> trusted_query_labels;
  std::vector<size_t> untrusted_query;       // untrusted pool positions
  std::vector<std::string> warnings;         // ShotsReduced notes
};

// trusted_by_class: per class, positions into the trusted pool.
Episode sample_episode(const std::vector<std::vector<size_t>>& trusted_by_class,
                       size_t untrusted_count, const EpisodeSpec& spec, Rng& rng);

// Per-class prototype vectors with EMA refresh.
struct PrototypeBank {
  std::vector<std::vector<double>> protos;  // empty vector: class not yet seen
  double xi = 0.3;
  int update_interval = 5;
  int warmup_episodes = 50;
  bool initialized = false;

  int n_classes() const { return static_cast<int>(protos.size()); }
};

// Mean of the support features per class; classes absent from `features`
// keep an empty slot and trip MissingClass only if requested downstream.
std::vector<std::vector<double>> compute_prototypes(
    const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
    int n_classes);

// P_c <- xi * P_new + (1 - xi) * P_c for every class present in new_protos.
void ema_update_prototypes(PrototypeBank& bank,
                           const std::vector<std::vector<double>>& new_protos);

// softmax over exp(-dist(feature, P_c)).
std::vector<double> soft_label(const std::vector<double>& feature, const PrototypeBank& bank,
                               DistanceMode mode = DistanceMode::NegCosine);

// Per-sample confidence tracked persistently across episodes.
struct ConfidenceState {
  double mu = 0.6;
  double delta = 0.5;
  double init = 0.0;
  std::unordered_map<uint64_t, double> c;

  bool tracked(uint64_t id) const { return c.count(id) != 0; }
  double get(uint64_t id) const;
  // c <- mu c + (1 - mu) p(x)^T y, creating the entry at `init` on first touch.
  void update(uint64_t id, const std::vector<double>& soft, int observed_label);
};

// eta_i = c_i if c_i > delta else 0. Unknown sample -> UnknownSample.
std::vector<double> mask_weights(const ConfidenceState& state, const std::vector<uint64_t>& ids);
int count_active(const std::vector<double>& weights);

struct TeacherLossNodes {
  int l_t;    // summed CE over support + trusted query
  int l_ur;   // mask-weighted summed CE over untrusted query
  int l_cls;  // (L_t + L_ur) / (U + V + W')
  int w_prime;
};

// Builds the episode loss on the tape. Mask weights are constants; gradient
// flows only through the logits.
template <typename T>
TeacherLossNodes teacher_losses(nn::Tape<T>& tape, int trusted_logits,
                                const std::vector<int>& trusted_labels, int untrusted_logits,
                                const std::vector<int>& observed_labels,
                                const std::vector<double>& mask) {
  const int uv = static_cast<int>(trusted_labels.size());
  if (uv == 0) fail(ErrorCode::ShapeError, "episode must carry trusted samples");
  const int l_t = nn::sum_all(tape, nn::softmax_ce(tape, trusted_logits, trusted_labels));
  int w_prime = count_active(mask);
  int l_ur;
  if (observed_labels.empty()) {
    l_ur = tape.leaf(nn::Tensor<T>({1}));  // zero
    w_prime = 0;
  } else {
    l_ur = nn::weighted_sum(tape, nn::softmax_ce(tape, untrusted_logits, observed_labels), mask);
  }
  const int joint = nn::axpby(tape, 1.0, l_t, 1.0, l_ur);
  const int l_cls = nn::scale(tape, joint, 1.0 / static_cast<double>(uv + w_prime));
  return {l_t, l_ur, l_cls, w_prime};
}

// Diagnostics export: id,confidence,soft_label_argmax rows.
void save_confidence_csv(const std::string& path, const std::vector<uint64_t>& ids,
                         const ConfidenceState& state, const std::vector<int>& soft_argmax);

}  // namespace tshn::teacher
