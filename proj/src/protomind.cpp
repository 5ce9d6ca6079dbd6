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

#include "protomind.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace tshn::teacher {

Episode sample_episode(const std::vector<std::vector<size_t>>& trusted_by_class,
                       size_t untrusted_count, const EpisodeSpec& spec, Rng& rng) {
  const int n_classes = static_cast<int>(trusted_by_class.size());
  int ways = spec.ways > 0 ? spec.ways : std::min(11, n_classes);
  if (ways < 2) fail(ErrorCode::NeedTwoClasses, "an episode needs at least two classes");
  if (ways > n_classes) fail(ErrorCode::ConfigError, "ways exceeds class count");
  if (spec.shots < 1 || spec.trusted_query < 1)
    fail(ErrorCode::ConfigError, "shots and trusted query must be >= 1");

  Episode ep;
  std::vector<int> class_order = rng.sample_without_replacement(static_cast<size_t>(n_classes),
                                                                static_cast<size_t>(ways));
  std::sort(class_order.begin(), class_order.end());
  ep.classes = class_order;

  for (int c : ep.classes) {
    const auto& pool = trusted_by_class[static_cast<size_t>(c)];
    const int avail = static_cast<int>(pool.size());
    if (avail < 2)
      fail(ErrorCode::InsufficientTrusted,
           "class " + std::to_string(c) + " has fewer than 2 trusted samples");
    // Shrink shots first, then query, keeping both at least 1 and disjoint.
    int shots = std::min(spec.shots, avail - 1);
    int query = std::min(spec.trusted_query, avail - shots);
    if (shots < spec.shots || query < spec.trusted_query)
      ep.warnings.push_back("ShotsReduced: class " + std::to_string(c) + " has " +
                            std::to_string(avail) + " trusted samples; using " +
                            std::to_string(shots) + "-shot/" + std::to_string(query) + "-query");
    const auto picks =
        rng.sample_without_replacement(pool.size(), static_cast<size_t>(shots + query));
    for (int i = 0; i < shots; ++i) {
      ep.support.push_back(pool[static_cast<size_t>(picks[static_cast<size_t>(i)])]);
      ep.support_labels.push_back(c);
    }
    for (int i = shots; i < shots + query; ++i) {
      ep.trusted_query.push_back(pool[static_cast<size_t>(picks[static_cast<size_t>(i)])]);
      ep.trusted_query_labels.push_back(c);
    }
  }

  if (untrusted_count > 0 && spec.untrusted_query > 0) {
    const size_t w = std::min<size_t>(static_cast<size_t>(spec.untrusted_query), untrusted_count);
    for (int i : rng.sample_without_replacement(untrusted_count, w))
      ep.untrusted_query.push_back(static_cast<size_t>(i));
  }
  return ep;
}

std::vector<std::vector<double>> compute_prototypes(
    const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
    int n_classes) {
  if (features.size() != labels.size())
    fail(ErrorCode::ShapeError, "features/labels length mismatch");
  if (features.empty()) fail(ErrorCode::MissingClass, "no support features");
  std::vector<std::vector<double>> protos(static_cast<size_t>(n_classes));
  std::vector<int> counts(static_cast<size_t>(n_classes), 0);
  const size_t dim = features[0].size();
  for (size_t i = 0; i < features.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || c >= n_classes) fail(ErrorCode::ShapeError, "label out of range");
    if (features[i].size() != dim) fail(ErrorCode::ShapeError, "inconsistent feature dims");
    auto& p = protos[static_cast<size_t>(c)];
    if (p.empty()) p.assign(dim, 0.0);
    for (size_t d = 0; d < dim; ++d) p[d] += features[i][d];
    ++counts[static_cast<size_t>(c)];
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts[static_cast<size_t>(c)] == 0) continue;
    for (double& v : protos[static_cast<size_t>(c)])
      v /= static_cast<double>(counts[static_cast<size_t>(c)]);
  }
  return protos;
}

void ema_update_prototypes(PrototypeBank& bank,
                           const std::vector<std::vector<double>>& new_protos) {
  if (!bank.initialized) {
    bank.protos = new_protos;
    bank.initialized = true;
    return;
  }
  if (new_protos.size() != bank.protos.size())
    fail(ErrorCode::ShapeError, "prototype class count mismatch");
  for (size_t c = 0; c < new_protos.size(); ++c) {
    if (new_protos[c].empty()) continue;  // class absent from this refresh
    auto& old = bank.protos[c];
    if (old.empty()) {
      old = new_protos[c];
      continue;
    }
    if (old.size() != new_protos[c].size())
      fail(ErrorCode::ShapeError, "prototype dimension mismatch");
    for (size_t d = 0; d < old.size(); ++d)
      old[d] = bank.xi * new_protos[c][d] + (1.0 - bank.xi) * old[d];
  }
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::DegenerateVector, "cosine of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

std::vector<double> soft_label(const std::vector<double>& feature, const PrototypeBank& bank,
                               DistanceMode mode) {
  if (!bank.initialized) fail(ErrorCode::NotWarmedUp, "prototype bank not initialized");
  const int n = bank.n_classes();
  std::vector<double> neg_dist(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c) {
    const auto& p = bank.protos[static_cast<size_t>(c)];
    if (p.empty()) fail(ErrorCode::MissingClass, "class " + std::to_string(c) + " has no prototype");
    if (p.size() != feature.size()) fail(ErrorCode::ShapeError, "feature/prototype dim mismatch");
    const double cos = cosine(feature, p);
    const double dist = mode == DistanceMode::NegCosine ? -cos : 1.0 - cos;
    neg_dist[static_cast<size_t>(c)] = -dist;
  }
  double m = neg_dist[0];
  for (double v : neg_dist) m = std::max(m, v);
  double sum = 0.0;
  std::vector<double> p(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c) {
    p[static_cast<size_t>(c)] = std::exp(neg_dist[static_cast<size_t>(c)] - m);
    sum += p[static_cast<size_t>(c)];
  }
  for (double& v : p) v /= sum;
  return p;
}

double ConfidenceState::get(uint64_t id) const {
  const auto it = c.find(id);
  if (it == c.end()) fail(ErrorCode::UnknownSample, "no confidence for id " + std::to_string(id));
  return it->second;
}

void ConfidenceState::update(uint64_t id, const std::vector<double>& soft, int observed_label) {
  if (observed_label < 0 || observed_label >= static_cast<int>(soft.size()))
    fail(ErrorCode::ShapeError, "observed label out of range");
  const double agreement = soft[static_cast<size_t>(observed_label)];
  auto [it, inserted] = c.try_emplace(id, init);
  it->second = mu * it->second + (1.0 - mu) * agreement;
}

std::vector<double> mask_weights(const ConfidenceState& state, const std::vector<uint64_t>& ids) {
  std::vector<double> out;
  out.reserve(ids.size());
  for (uint64_t id : ids) {
    const double ci = state.get(id);
    out.push_back(ci > state.delta ? ci : 0.0);  // strict inequality at the threshold
  }
  return out;
}

int count_active(const std::vector<double>& weights) {
  int n = 0;
  for (double w : weights)
    if (w != 0.0) ++n;
  return n;
}

void save_confidence_csv(const std::string& path, const std::vector<uint64_t>& ids,
                         const ConfidenceState& state, const std::vector<int>& soft_argmax) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path);
  if (!os) fail(ErrorCode::IoError, "cannot write " + path);
  os << "id,confidence,soft_label_argmax\n";
  char buf[32];
  for (size_t i = 0; i < ids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", state.get(ids[i]));
    os << ids[i] << "," << buf << "," << (i < soft_argmax.size() ? soft_argmax[i] : -1) << "\n";
  }
}

}  // namespace tshn::teacher
