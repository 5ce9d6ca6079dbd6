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

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "network.hpp"
#include "noiselab.hpp"
#include "protomind.hpp"
#include "sigsynth.hpp"

namespace tshn::distill {

// Flat sample store used by all trainers. Labels are whatever the consumer
// is allowed to see: observed labels for the untrusted pool, true labels
// elsewhere.
struct Pool {
  int sample_len = 0;
  std::vector<uint64_t> ids;
  std::vector<int> labels;
  std::vector<int16_t> snrs;
  std::vector<float> iq;  // size() * 2 * sample_len

  size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  void add(const sig::SignalRecord& rec, int label);
  nn::Tensor<float> gather(const std::vector<size_t>& idx) const;
  std::vector<int> gather_labels(const std::vector<size_t>& idx) const;
  std::vector<uint64_t> gather_ids(const std::vector<size_t>& idx) const;
};

// Training-time view of a dataset: trusted (true labels), untrusted
// (observed labels), val/test (true labels, evaluation only).
struct TrainData {
  int n_classes = 0;
  Pool trusted;
  Pool untrusted;
  Pool val;
  Pool test;
  // Optional MVS-expanded pool driving teacher episodes; falls back to
  // `trusted` when empty. Phase-2 D_t always uses the original trusted set.
  Pool episode_trusted;

  const Pool& episodes_pool() const { return episode_trusted.empty() ? trusted : episode_trusted; }
};

TrainData assemble_train_data(const sig::Dataset& ds, const sig::Split& split,
                              const std::vector<uint64_t>& untrusted_ids,
                              const std::vector<int>& observed_labels);

struct Partition {
  std::vector<uint64_t> d_t;
  std::vector<uint64_t> d_p;
  std::vector<uint64_t> d_u;
};

// d_p = {i : c_i > delta}; d_u the rest; d_t passed through.
Partition make_partition(const std::vector<uint64_t>& trusted_ids,
                         const std::vector<uint64_t>& untrusted_ids,
                         const teacher::ConfidenceState& conf, double delta);

enum class GlcProbe { Dedicated, Student };

struct LossConfig {
  double epsilon = 0.5;
  double delta = 0.5;
  GlcProbe glc_probe = GlcProbe::Dedicated;
  int probe_epochs = 5;
};

struct TeacherConfig {
  int episodes = 400;          // G
  int warmup = 50;             // episodes before the first prototype
  int update_interval = 5;     // I_b
  double xi = 0.3;
  double mu = 0.6;
  double delta = 0.5;
  double confidence_init = 0.0;
  teacher::EpisodeSpec episode;
  teacher::DistanceMode distance = teacher::DistanceMode::NegCosine;
  int snapshot_every = 0;  // confidence CSV cadence in episodes; 0 = final only
};

struct TrainConfig {
  int phase2_epochs = 12;
  int batch = 64;
  nn::OptKind optimizer = nn::OptKind::Adam;
  double lr = 1e-3;
  uint64_t seed = 1;
  int repartition_every = 0;  // phase-2 epochs between refreshes; 0 = off
  int baseline_epochs = 30;
  double gce_q = 0.7;
  int log_every = 50;  // phase-1 metrics cadence in episodes
};

// Deterministic JSON-lines metrics writer; excludes wall-clock so reruns are
// byte-identical.
class MetricsLog {
 public:
  void add(const std::string& line) { lines_.push_back(line); }
  const std::vector<std::string>& lines() const { return lines_; }
  void write(const std::string& path) const;

 private:
  std::vector<std::string> lines_;
};

struct Evaluation {
  double accuracy = 0.0;
  std::map<int, std::pair<int, int>> per_snr;  // snr -> (correct, total)
  std::vector<std::vector<int>> confusion;     // true x predicted
};

Evaluation evaluate_pool(const nn::Embedding<float>& net, const Pool& pool, int batch = 256);

// Mean softmax prediction over trusted samples per true class, rows
// re-normalized; classes with no trusted sample fall back to identity rows.
noise::TransitionMatrix estimate_glc(const nn::Embedding<float>& probe, const Pool& trusted,
                                     int n_classes, std::vector<std::string>* warnings = nullptr);

// Plain-CE probe on the untrusted pool (observed labels), for transition
// estimation only.
nn::Embedding<float> train_glc_probe(const TrainData& data, const nn::NetConfig& net_cfg,
                                     const TrainConfig& cfg, int epochs);

struct TshnResult {
  nn::Embedding<float> net;
  Partition partition;
  noise::TransitionMatrix transition;
  teacher::ConfidenceState confidence;
  std::vector<std::string> warnings;
  double final_val_accuracy = 0.0;
  int64_t clamp_events = 0;
};

// Two-phase training: episodic teacher meta-training with prototype EMA and
// confidence tracking, then partition + GLC estimation + divide-and-conquer
// epochs. Fully deterministic given cfg.seed.
TshnResult train_tshn(const TrainData& data, const nn::NetConfig& net_cfg,
                      const TeacherConfig& tc, const TrainConfig& cfg, const LossConfig& lc,
                      MetricsLog* metrics, const std::string& run_dir = "");

}  // namespace tshn::distill
