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
#include <utility>
#include <vector>

#include "error.hpp"

namespace tshn::noise {

enum class NoiseKind { Symmetric, FlipOne, Mixed };

// Corruption model. For FlipOne/Mixed, pairs are disjoint (a, b) class pairs
// flipped in both directions; Mixed applies symmetric noise at the same rate
// to every unpaired class.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Symmetric;
  double rate = 0.0;  // eta in [0,1]
  std::vector<std::pair<int, int>> pairs;
  uint64_t seed = 0;
};

// Row-stochastic N x N matrix, c[i][j] = P(observed = j | true = i).
struct TransitionMatrix {
  std::vector<std::vector<double>> c;

  int n() const { return static_cast<int>(c.size()); }
  static TransitionMatrix identity(int n);
  void validate() const;  // row sums within 1e-9 of 1, entries in [0,1]
  double linf_distance(const TransitionMatrix& other) const;
};

struct CorruptionRecord {
  uint64_t id;
  int true_label;
  int observed_label;
};

TransitionMatrix spec_to_matrix(const NoiseSpec& spec, int n_classes);

// Independently resamples each label from its transition row. The returned
// ledger is evaluation-only material and must never feed training.
struct CorruptionResult {
  std::vector<int> observed;
  std::vector<CorruptionRecord> ledger;
};
CorruptionResult corrupt(const std::vector<int>& labels, const std::vector<uint64_t>& ids,
                         const NoiseSpec& spec, int n_classes);

// Row-normalized count matrix. Every class must appear among true labels.
TransitionMatrix empirical_transition(const std::vector<int>& true_labels,
                                      const std::vector<int>& observed_labels, int n_classes);

void save_ledger_csv(const std::vector<CorruptionRecord>& ledger, const std::string& path);
std::vector<CorruptionRecord> load_ledger_csv(const std::string& path);

void save_transition_csv(const TransitionMatrix& m, const std::string& path);

// "sym:0.8", "flip:QAM16-QAM64,QPSK-8PSK:0.6", "mixed:0.6" (mixed defaults to
// the two hard pairs), with class names resolved against the dataset list.
NoiseSpec parse_noise_string(const std::string& text, const std::vector<std::string>& class_names);

}  // namespace tshn::noise
