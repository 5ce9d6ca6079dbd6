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

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"

namespace tshn::sig {

// Canonical class order: eight digital schemes first (the desk default),
// analog schemes after (the 11-class mode).
enum class Scheme {
  BPSK,
  QPSK,
  PSK8,
  QAM16,
  QAM64,
  PAM4,
  CPFSK,
  BFSK,
  AM_DSB,
  AM_SSB,
  WBFM,
};

constexpr int kNumSchemes = 11;

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);  // throws UnsupportedModulation
std::vector<std::string> canonical_classes(int n);

// Channel impairments applied to the clean baseband waveform. snr_db may be
// +infinity for a noiseless record.
struct ChannelSpec {
  double snr_db = 10.0;
  double cfo = 0.0;    // normalized frequency offset, cycles/sample, |cfo| < 0.5
  double phase = 0.0;  // radians
  double sro = 0.0;    // sample-rate offset ratio
};

// One labeled IQ sample: I row followed by Q row, each sample_len long.
struct SignalRecord {
  uint64_t id = 0;
  uint16_t label = 0;
  int16_t snr_db = 0;
  int sample_len = 0;
  std::vector<float> iq;

  const float* i_row() const { return iq.data(); }
  const float* q_row() const { return iq.data() + sample_len; }
  float* i_row() { return iq.data(); }
  float* q_row() { return iq.data() + sample_len; }
};

// Clean component is normalized to exactly unit average power before noise;
// AWGN power is set so the expected SNR matches snr_db. A len that is not a
// multiple of samples_per_symbol is handled by truncating the final symbol.
SignalRecord synthesize(Scheme scheme, const ChannelSpec& chan, int samples_per_symbol, int len,
                        uint64_t seed);

struct DatasetRequest {
  std::vector<std::string> class_names;
  std::vector<int> snrs_db;
  int per_class_per_snr = 0;
  int sample_len = 128;
  int samples_per_symbol = 8;
  uint64_t seed = 0;
  double cfo = 0.0;
  double phase = 0.0;
  double sro = 0.0;
};

struct StratumCount {
  int label;
  int snr_db;
  int count;
};

struct Manifest {
  uint16_t format_version = 1;
  std::vector<std::string> class_names;
  int sample_len = 0;
  int samples_per_symbol = 8;
  uint64_t seed = 0;
  std::vector<StratumCount> counts;
};

struct Dataset {
  Manifest manifest;
  std::vector<SignalRecord> records;

  int n_classes() const { return static_cast<int>(manifest.class_names.size()); }
  const SignalRecord& by_id(uint64_t id) const;
};

Dataset generate_dataset(const DatasetRequest& req);

// Binary record file <stem>.sig plus JSON manifest sidecar <stem>.json.
void save_dataset(const Dataset& ds, const std::string& stem);
Dataset load_dataset(const std::string& path);  // stem, .sig file, or directory

// Stratified 3-way split plus trusted subset drawn from the training portion.
// All four sets are disjoint id lists covering the dataset.
struct Split {
  std::vector<uint64_t> trusted;
  std::vector<uint64_t> untrusted;
  std::vector<uint64_t> val;
  std::vector<uint64_t> test;
};

// trusted_per_class > 0 overrides trusted_fraction with an exact per-class
// count. With a fraction, allocation is floor-per-stratum with largest
// remainders, then at least one sample per class.
Split split_dataset(const Dataset& ds, const std::array<double, 3>& ratios,
                    double trusted_fraction, uint64_t seed, int trusted_per_class = 0);

}  // namespace tshn::sig
