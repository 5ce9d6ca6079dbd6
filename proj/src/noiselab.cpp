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

#include "noiselab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rng.hpp"

namespace tshn::noise {

TransitionMatrix TransitionMatrix::identity(int n) {
  TransitionMatrix m;
  m.c.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) m.c[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
  return m;
}

void TransitionMatrix::validate() const {
  for (const auto& row : c) {
    if (row.size() != c.size()) fail(ErrorCode::ShapeError, "transition matrix not square");
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0 || v > 1.0) fail(ErrorCode::ShapeError, "transition entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorCode::ShapeError, "transition row sum deviates from 1 by " +
                                      std::to_string(std::abs(sum - 1.0)));
  }
}

double TransitionMatrix::linf_distance(const TransitionMatrix& other) const {
  double d = 0.0;
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) d = std::max(d, std::abs(c[i][j] - other.c[i][j]));
  return d;
}

namespace {

void check_pairs(const std::vector<std::pair<int, int>>& pairs, int n_classes) {
  std::vector<bool> used(static_cast<size_t>(n_classes), false);
  for (const auto& [a, b] : pairs) {
    if (a < 0 || a >= n_classes || b < 0 || b >= n_classes)
      fail(ErrorCode::InvalidPair, "pair index out of range: (" + std::to_string(a) + "," +
                                       std::to_string(b) + ")");
    if (a == b) fail(ErrorCode::InvalidPair, "pair must name two distinct classes");
    if (used[static_cast<size_t>(a)] || used[static_cast<size_t>(b)])
      fail(ErrorCode::InvalidPair, "flip pairs must be disjoint");
    used[static_cast<size_t>(a)] = used[static_cast<size_t>(b)] = true;
  }
}

}  // namespace

TransitionMatrix spec_to_matrix(const NoiseSpec& spec, int n_classes) {
  if (n_classes < 2) fail(ErrorCode::ConfigError, "need at least 2 classes");
  if (spec.rate < 0.0 || spec.rate > 1.0) fail(ErrorCode::ConfigError, "rate must be in [0,1]");
  if (spec.kind != NoiseKind::Symmetric) check_pairs(spec.pairs, n_classes);

  const double eta = spec.rate;
  TransitionMatrix m = TransitionMatrix::identity(n_classes);
  auto symmetric_row = [&](int i) {
    for (int j = 0; j < n_classes; ++j)
      m.c[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          (i == j) ? 1.0 - eta : eta / (n_classes - 1);
  };
  auto flip_row = [&](int a, int b) {
    m.c[static_cast<size_t>(a)][static_cast<size_t>(a)] = 1.0 - eta;
    m.c[static_cast<size_t>(a)][static_cast<size_t>(b)] = eta;
  };

  switch (spec.kind) {
    case NoiseKind::Symmetric:
      for (int i = 0; i < n_classes; ++i) symmetric_row(i);
      break;
    case NoiseKind::FlipOne:
      for (const auto& [a, b] : spec.pairs) {
        flip_row(a, b);
        flip_row(b, a);
      }
      break;
    case NoiseKind::Mixed: {
      std::vector<bool> paired(static_cast<size_t>(n_classes), false);
      for (const auto& [a, b] : spec.pairs)
        paired[static_cast<size_t>(a)] = paired[static_cast<size_t>(b)] = true;
      for (int i = 0; i < n_classes; ++i)
        if (!paired[static_cast<size_t>(i)]) symmetric_row(i);
      for (const auto& [a, b] : spec.pairs) {
        flip_row(a, b);
        flip_row(b, a);
      }
      break;
    }
  }
  m.validate();
  return m;
}

CorruptionResult corrupt(const std::vector<int>& labels, const std::vector<uint64_t>& ids,
                         const NoiseSpec& spec, int n_classes) {
  if (labels.size() != ids.size()) fail(ErrorCode::ShapeError, "labels/ids length mismatch");
  const TransitionMatrix m = spec_to_matrix(spec, n_classes);
  Rng rng(mix_seed(spec.seed));
  CorruptionResult out;
  out.observed.reserve(labels.size());
  out.ledger.reserve(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= n_classes) fail(ErrorCode::ConfigError, "label out of range");
    const int obs = rng.categorical(m.c[static_cast<size_t>(y)]);
    out.observed.push_back(obs);
    out.ledger.push_back({ids[i], y, obs});
  }
  return out;
}

TransitionMatrix empirical_transition(const std::vector<int>& true_labels,
                                      const std::vector<int>& observed_labels, int n_classes) {
  if (true_labels.size() != observed_labels.size())
    fail(ErrorCode::ShapeError, "label list length mismatch");
  std::vector<std::vector<double>> counts(static_cast<size_t>(n_classes),
                                          std::vector<double>(static_cast<size_t>(n_classes), 0.0));
  for (size_t i = 0; i < true_labels.size(); ++i)
    counts[static_cast<size_t>(true_labels[i])][static_cast<size_t>(observed_labels[i])] += 1.0;
  TransitionMatrix m;
  m.c = std::move(counts);
  for (int i = 0; i < n_classes; ++i) {
    double row_sum = 0.0;
    for (double v : m.c[static_cast<size_t>(i)]) row_sum += v;
    if (row_sum == 0.0)
      fail(ErrorCode::UndefinedRow, "class " + std::to_string(i) + " absent from true labels");
    for (double& v : m.c[static_cast<size_t>(i)]) v /= row_sum;
  }
  m.validate();
  return m;
}

void save_ledger_csv(const std::vector<CorruptionRecord>& ledger, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path);
  if (!os) fail(ErrorCode::IoError, "cannot write ledger " + path);
  os << "id,true_label,observed_label\n";
  for (const auto& r : ledger)
    os << r.id << "," << r.true_label << "," << r.observed_label << "\n";
}

std::vector<CorruptionRecord> load_ledger_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::IoError, "cannot open ledger " + path);
  std::vector<CorruptionRecord> out;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    CorruptionRecord r;
    if (std::sscanf(line.c_str(), "%lu,%d,%d", &r.id, &r.true_label, &r.observed_label) != 3)
      fail(ErrorCode::IoError, "malformed ledger line: " + line);
    out.push_back(r);
  }
  return out;
}

void save_transition_csv(const TransitionMatrix& m, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path);
  if (!os) fail(ErrorCode::IoError, "cannot write " + path);
  char buf[64];
  for (const auto& row : m.c) {
    for (size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", row[j]);
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
}

NoiseSpec parse_noise_string(const std::string& text,
                             const std::vector<std::string>& class_names) {
  auto class_index = [&](const std::string& name) {
    for (size_t i = 0; i < class_names.size(); ++i)
      if (class_names[i] == name) return static_cast<int>(i);
    fail(ErrorCode::ConfigError, "noise spec references unknown class '" + name + "'");
  };
  auto hard_pairs = [&]() {
    std::vector<std::pair<int, int>> pairs;
    auto has = [&](const char* n) {
      return std::find(class_names.begin(), class_names.end(), n) != class_names.end();
    };
    if (has("QAM16") && has("QAM64")) pairs.emplace_back(class_index("QAM16"), class_index("QAM64"));
    if (has("QPSK") && has("8PSK")) pairs.emplace_back(class_index("QPSK"), class_index("8PSK"));
    if (pairs.empty())
      fail(ErrorCode::ConfigError, "mixed noise needs QAM16/QAM64 or QPSK/8PSK in the class list");
    return pairs;
  };

  NoiseSpec spec;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2) fail(ErrorCode::ConfigError, "malformed noise spec '" + text + "'");

  const std::string& kind = parts[0];
  const std::string& rate_str = parts.back();
  try {
    spec.rate = std::stod(rate_str);
  } catch (...) {
    fail(ErrorCode::ConfigError, "malformed noise rate '" + rate_str + "'");
  }
  if (spec.rate < 0.0 || spec.rate > 1.0)
    fail(ErrorCode::ConfigError, "noise rate must be in [0,1]");

  if (kind == "sym") {
    spec.kind = NoiseKind::Symmetric;
  } else if (kind == "flip" || kind == "mixed") {
    spec.kind = kind == "flip" ? NoiseKind::FlipOne : NoiseKind::Mixed;
    if (parts.size() == 3) {
      std::stringstream ps(parts[1]);
      std::string pair;
      while (std::getline(ps, pair, ',')) {
        const auto dash = pair.find('-');
        if (dash == std::string::npos)
          fail(ErrorCode::ConfigError, "malformed class pair '" + pair + "'");
        spec.pairs.emplace_back(class_index(pair.substr(0, dash)),
                                class_index(pair.substr(dash + 1)));
      }
    } else {
      spec.pairs = hard_pairs();
    }
  } else {
    fail(ErrorCode::ConfigError, "unknown noise kind '" + kind + "'");
  }
  return spec;
}

}  // namespace tshn::noise
