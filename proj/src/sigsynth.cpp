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

#include "sigsynth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rng.hpp"

namespace fs = std::filesystem;

namespace tshn::sig {

namespace {

const std::array<const char*, kNumSchemes> kSchemeNames = {
    "BPSK", "QPSK", "8PSK", "QAM16", "QAM64", "PAM4", "CPFSK", "BFSK",
    "AM-DSB", "AM-SSB", "WBFM"};

using cplx = std::complex<double>;

std::vector<cplx> constellation(Scheme s) {
  switch (s) {
    case Scheme::BPSK:
      return {{1, 0}, {-1, 0}};
    case Scheme::QPSK: {
      const double a = 1.0 / std::sqrt(2.0);
      return {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
    }
    case Scheme::PSK8: {
      std::vector<cplx> pts;
      for (int k = 0; k < 8; ++k)
        pts.push_back(std::polar(1.0, 2.0 * M_PI * k / 8.0));
      return pts;
    }
    case Scheme::QAM16: {
      std::vector<cplx> pts;
      const double scale = 1.0 / std::sqrt(10.0);
      for (int i : {-3, -1, 1, 3})
        for (int q : {-3, -1, 1, 3}) pts.emplace_back(i * scale, q * scale);
      return pts;
    }
    case Scheme::QAM64: {
      std::vector<cplx> pts;
      const double scale = 1.0 / std::sqrt(42.0);
      for (int i = -7; i <= 7; i += 2)
        for (int q = -7; q <= 7; q += 2) pts.emplace_back(i * scale, q * scale);
      return pts;
    }
    case Scheme::PAM4: {
      std::vector<cplx> pts;
      const double scale = 1.0 / std::sqrt(5.0);
      for (int i : {-3, -1, 1, 3}) pts.emplace_back(i * scale, 0.0);
      return pts;
    }
    default:
      fail(ErrorCode::UnsupportedModulation, "no constellation for scheme");
  }
}

// Multi-tone message for the analog schemes, normalized to unit rms.
struct Message {
  std::array<double, 3> freq, amp, phase;

  static Message draw(Rng& rng) {
    Message m;
    for (int i = 0; i < 3; ++i) {
      m.freq[i] = rng.uniform(0.004, 0.05);
      m.amp[i] = rng.uniform(0.5, 1.0);
      m.phase[i] = rng.uniform(0.0, 2.0 * M_PI);
    }
    const double rms = std::sqrt(0.5 * (m.amp[0] * m.amp[0] + m.amp[1] * m.amp[1] +
                                        m.amp[2] * m.amp[2]));
    for (double& a : m.amp) a /= rms;
    return m;
  }

  double operator()(int t) const {
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += amp[i] * std::cos(2.0 * M_PI * freq[i] * t + phase[i]);
    return v;
  }
};

std::vector<cplx> clean_waveform(Scheme scheme, int sps, int len, Rng& rng) {
  std::vector<cplx> s(static_cast<size_t>(len));
  switch (scheme) {
    case Scheme::BPSK:
    case Scheme::QPSK:
    case Scheme::PSK8:
    case Scheme::QAM16:
    case Scheme::QAM64:
    case Scheme::PAM4: {
      const auto pts = constellation(scheme);
      cplx sym = pts[static_cast<size_t>(rng.index(pts.size()))];
      for (int t = 0; t < len; ++t) {
        if (t != 0 && t % sps == 0) sym = pts[static_cast<size_t>(rng.index(pts.size()))];
        s[static_cast<size_t>(t)] = sym;
      }
      return s;
    }
    case Scheme::BFSK: {
      // Phase-continuous binary FSK, one cycle per symbol of deviation.
      const double dev = 1.0 / sps;
      double phi = 0.0;
      double f = rng.bernoulli(0.5) ? dev : -dev;
      for (int t = 0; t < len; ++t) {
        if (t != 0 && t % sps == 0) f = rng.bernoulli(0.5) ? dev : -dev;
        s[static_cast<size_t>(t)] = std::polar(1.0, phi);
        phi += 2.0 * M_PI * f;
      }
      return s;
    }
    case Scheme::CPFSK: {
      // Modulation index 0.5.
      const double h = 0.5;
      double phi = 0.0;
      double a = rng.bernoulli(0.5) ? 1.0 : -1.0;
      for (int t = 0; t < len; ++t) {
        if (t != 0 && t % sps == 0) a = rng.bernoulli(0.5) ? 1.0 : -1.0;
        s[static_cast<size_t>(t)] = std::polar(1.0, phi);
        phi += M_PI * h * a / sps;
      }
      return s;
    }
    case Scheme::AM_DSB: {
      const Message m = Message::draw(rng);
      for (int t = 0; t < len; ++t) s[static_cast<size_t>(t)] = cplx(1.0 + 0.5 * m(t), 0.0);
      return s;
    }
    case Scheme::AM_SSB: {
      const Message m = Message::draw(rng);
      for (int t = 0; t < len; ++t) {
        cplx v = 0.0;
        for (int i = 0; i < 3; ++i)
          v += m.amp[i] * std::polar(1.0, 2.0 * M_PI * m.freq[i] * t + m.phase[i]);
        s[static_cast<size_t>(t)] = v;
      }
      return s;
    }
    case Scheme::WBFM: {
      const Message m = Message::draw(rng);
      const double kf = 0.05;  // rms frequency deviation, cycles/sample
      double phi = 0.0;
      for (int t = 0; t < len; ++t) {
        s[static_cast<size_t>(t)] = std::polar(1.0, phi);
        phi += 2.0 * M_PI * kf * m(t);
      }
      return s;
    }
  }
  fail(ErrorCode::UnsupportedModulation, "unhandled scheme");
}

constexpr char kFileMagic[4] = {'S', 'I', 'G', '1'};
constexpr uint16_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorCode::IoError, "truncated dataset file");
  return v;
}

}  // namespace

const char* scheme_name(Scheme s) { return kSchemeNames[static_cast<size_t>(s)]; }

Scheme parse_scheme(const std::string& name) {
  for (int i = 0; i < kNumSchemes; ++i)
    if (name == kSchemeNames[static_cast<size_t>(i)]) return static_cast<Scheme>(i);
  fail(ErrorCode::UnsupportedModulation, "unknown modulation scheme '" + name + "'");
}

std::vector<std::string> canonical_classes(int n) {
  if (n < 2 || n > kNumSchemes)
    fail(ErrorCode::ConfigError, "class count must be in [2," + std::to_string(kNumSchemes) + "]");
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(kSchemeNames[static_cast<size_t>(i)]);
  return out;
}

SignalRecord synthesize(Scheme scheme, const ChannelSpec& chan, int samples_per_symbol, int len,
                        uint64_t seed) {
  if (len < 16) fail(ErrorCode::ConfigError, "sample length must be >= 16");
  if (samples_per_symbol < 1) fail(ErrorCode::ConfigError, "samples_per_symbol must be >= 1");
  if (std::abs(chan.cfo) >= 0.5) fail(ErrorCode::ConfigError, "|cfo| must be < 0.5");

  Rng rng(mix_seed(seed));

  // Source is synthesized long enough that sample-rate offset resampling
  // never reads past the end.
  const double rate = 1.0 + chan.sro;
  const int src_len = static_cast<int>(std::ceil(len * std::max(rate, 1.0))) + 2;
  std::vector<cplx> src = clean_waveform(scheme, samples_per_symbol, src_len, rng);

  std::vector<cplx> s(static_cast<size_t>(len));
  if (chan.sro == 0.0) {
    std::copy(src.begin(), src.begin() + len, s.begin());
  } else {
    for (int t = 0; t < len; ++t) {
      const double x = t * rate;
      const int i0 = static_cast<int>(x);
      const double frac = x - i0;
      s[static_cast<size_t>(t)] =
          src[static_cast<size_t>(i0)] * (1.0 - frac) + src[static_cast<size_t>(i0 + 1)] * frac;
    }
  }

  if (chan.cfo != 0.0 || chan.phase != 0.0) {
    for (int t = 0; t < len; ++t)
      s[static_cast<size_t>(t)] *= std::polar(1.0, 2.0 * M_PI * chan.cfo * t + chan.phase);
  }

  double power = 0.0;
  for (const cplx& v : s) power += std::norm(v);
  power /= len;
  const double inv = 1.0 / std::sqrt(power);
  for (cplx& v : s) v *= inv;

  if (std::isfinite(chan.snr_db)) {
    const double noise_power = std::pow(10.0, -chan.snr_db / 10.0);
    const double comp_std = std::sqrt(noise_power / 2.0);
    for (cplx& v : s) v += cplx(rng.normal(0.0, comp_std), rng.normal(0.0, comp_std));
  }

  SignalRecord rec;
  rec.sample_len = len;
  rec.iq.resize(static_cast<size_t>(2 * len));
  for (int t = 0; t < len; ++t) {
    rec.iq[static_cast<size_t>(t)] = static_cast<float>(s[static_cast<size_t>(t)].real());
    rec.iq[static_cast<size_t>(len + t)] = static_cast<float>(s[static_cast<size_t>(t)].imag());
  }
  const double tag = std::isfinite(chan.snr_db) ? chan.snr_db : 32767.0;
  rec.snr_db = static_cast<int16_t>(std::lround(std::clamp(tag, -32768.0, 32767.0)));
  return rec;
}

const SignalRecord& Dataset::by_id(uint64_t id) const {
  // Records are written with sequential ids; fall back to scan otherwise.
  if (id < records.size() && records[static_cast<size_t>(id)].id == id)
    return records[static_cast<size_t>(id)];
  for (const auto& r : records)
    if (r.id == id) return r;
  fail(ErrorCode::UnknownSample, "no record with id " + std::to_string(id));
}

Dataset generate_dataset(const DatasetRequest& req) {
  if (req.class_names.size() < 2) fail(ErrorCode::ConfigError, "need at least 2 classes");
  if (req.per_class_per_snr < 1) fail(ErrorCode::ConfigError, "invalid per-class count");
  if (req.snrs_db.empty()) fail(ErrorCode::ConfigError, "need at least one SNR");
  for (int s : req.snrs_db)
    if (s < -20 || s > 30) fail(ErrorCode::ConfigError, "snr_db must be in [-20,30]");

  std::vector<Scheme> schemes;
  for (const auto& name : req.class_names) schemes.push_back(parse_scheme(name));

  Dataset ds;
  ds.manifest.format_version = kFormatVersion;
  ds.manifest.class_names = req.class_names;
  ds.manifest.sample_len = req.sample_len;
  ds.manifest.samples_per_symbol = req.samples_per_symbol;
  ds.manifest.seed = req.seed;

  uint64_t next_id = 0;
  for (size_t c = 0; c < schemes.size(); ++c) {
    for (size_t si = 0; si < req.snrs_db.size(); ++si) {
      for (int k = 0; k < req.per_class_per_snr; ++k) {
        const uint64_t stream = (static_cast<uint64_t>(c) << 40) |
                                (static_cast<uint64_t>(si) << 24) | static_cast<uint64_t>(k);
        ChannelSpec chan;
        chan.snr_db = req.snrs_db[si];
        chan.cfo = req.cfo;
        chan.phase = req.phase;
        chan.sro = req.sro;
        SignalRecord rec = synthesize(schemes[c], chan, req.samples_per_symbol, req.sample_len,
                                      derive_seed(req.seed, stream));
        rec.id = next_id++;
        rec.label = static_cast<uint16_t>(c);
        rec.snr_db = static_cast<int16_t>(req.snrs_db[si]);
        ds.records.push_back(std::move(rec));
      }
      ds.manifest.counts.push_back(
          {static_cast<int>(c), req.snrs_db[si], req.per_class_per_snr});
    }
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& stem) {
  const fs::path bin_path = fs::path(stem).concat(".sig");
  if (bin_path.has_parent_path()) fs::create_directories(bin_path.parent_path());
  std::ofstream os(bin_path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot write " + bin_path.string());
  os.write(kFileMagic, 4);
  write_pod<uint16_t>(os, ds.manifest.format_version);
  write_pod<uint16_t>(os, static_cast<uint16_t>(ds.manifest.class_names.size()));
  write_pod<uint32_t>(os, static_cast<uint32_t>(ds.manifest.sample_len));
  for (const auto& name : ds.manifest.class_names) {
    write_pod<uint16_t>(os, static_cast<uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (const auto& rec : ds.records) {
    write_pod<uint64_t>(os, rec.id);
    write_pod<uint16_t>(os, rec.label);
    write_pod<int16_t>(os, rec.snr_db);
    os.write(reinterpret_cast<const char*>(rec.iq.data()),
             static_cast<std::streamsize>(rec.iq.size() * sizeof(float)));
  }
  if (!os) fail(ErrorCode::IoError, "failed writing " + bin_path.string());

  nlohmann::json counts = nlohmann::json::array();
  for (const auto& c : ds.manifest.counts)
    counts.push_back({{"class", ds.manifest.class_names[static_cast<size_t>(c.label)]},
                      {"snr_db", c.snr_db},
                      {"count", c.count}});
  nlohmann::json j = {
      {"format_version", ds.manifest.format_version},
      {"class_names", ds.manifest.class_names},
      {"sample_len", ds.manifest.sample_len},
      {"samples_per_symbol", ds.manifest.samples_per_symbol},
      {"seed", ds.manifest.seed},
      {"n_records", ds.records.size()},
      {"counts", counts},
  };
  std::ofstream js(fs::path(stem).concat(".json"));
  js << j.dump(2) << "\n";
  if (!js) fail(ErrorCode::IoError, "failed writing manifest for " + stem);
}

Dataset load_dataset(const std::string& path) {
  fs::path bin_path(path);
  if (fs::is_directory(bin_path)) bin_path /= "dataset.sig";
  if (bin_path.extension() != ".sig") bin_path.concat(".sig");
  std::ifstream is(bin_path, std::ios::binary);
  if (!is) fail(ErrorCode::IoError, "cannot open dataset " + bin_path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kFileMagic, 4) != 0)
    fail(ErrorCode::IoError, "not a dataset file: " + bin_path.string());

  Dataset ds;
  ds.manifest.format_version = read_pod<uint16_t>(is);
  const uint16_t n_classes = read_pod<uint16_t>(is);
  ds.manifest.sample_len = static_cast<int>(read_pod<uint32_t>(is));
  for (int c = 0; c < n_classes; ++c) {
    const uint16_t len = read_pod<uint16_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    ds.manifest.class_names.push_back(std::move(name));
  }

  const int L = ds.manifest.sample_len;
  while (true) {
    uint64_t id;
    is.read(reinterpret_cast<char*>(&id), sizeof(id));
    if (!is) break;
    SignalRecord rec;
    rec.id = id;
    rec.label = read_pod<uint16_t>(is);
    rec.snr_db = read_pod<int16_t>(is);
    rec.sample_len = L;
    rec.iq.resize(static_cast<size_t>(2 * L));
    is.read(reinterpret_cast<char*>(rec.iq.data()),
            static_cast<std::streamsize>(rec.iq.size() * sizeof(float)));
    if (!is) fail(ErrorCode::IoError, "truncated record in " + bin_path.string());
    if (rec.label >= n_classes) fail(ErrorCode::IoError, "record label out of range");
    ds.records.push_back(std::move(rec));
  }

  // Manifest sidecar carries counts and seed; verify consistency if present.
  fs::path json_path = bin_path;
  json_path.replace_extension(".json");
  if (fs::exists(json_path)) {
    std::ifstream js(json_path);
    nlohmann::json j = nlohmann::json::parse(js);
    ds.manifest.seed = j.value("seed", 0ULL);
    ds.manifest.samples_per_symbol = j.value("samples_per_symbol", 8);
    if (j.contains("n_records") && j["n_records"].get<size_t>() != ds.records.size())
      fail(ErrorCode::IoError, "manifest record count does not match record file");
    if (j.contains("counts")) {
      for (const auto& c : j["counts"]) {
        const std::string cls = c.at("class").get<std::string>();
        const auto it = std::find(ds.manifest.class_names.begin(), ds.manifest.class_names.end(),
                                  cls);
        if (it == ds.manifest.class_names.end())
          fail(ErrorCode::IoError, "manifest counts reference unknown class " + cls);
        ds.manifest.counts.push_back(
            {static_cast<int>(it - ds.manifest.class_names.begin()),
             c.at("snr_db").get<int>(), c.at("count").get<int>()});
      }
      std::map<std::pair<int, int>, int> seen;
      for (const auto& rec : ds.records) seen[{rec.label, rec.snr_db}]++;
      for (const auto& c : ds.manifest.counts) {
        if (seen[{c.label, c.snr_db}] != c.count)
          fail(ErrorCode::IoError, "manifest counts inconsistent with record file");
      }
    }
  }
  return ds;
}

Split split_dataset(const Dataset& ds, const std::array<double, 3>& ratios,
                    double trusted_fraction, uint64_t seed, int trusted_per_class) {
  const double rsum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(rsum - 1.0) > 1e-9) fail(ErrorCode::ConfigError, "split ratios must sum to 1");
  if (trusted_per_class == 0 && (trusted_fraction <= 0.0 || trusted_fraction > 1.0))
    fail(ErrorCode::ConfigError, "trusted_fraction must be in (0,1]");

  // Strata keyed by (label, snr), iterated in sorted order for determinism.
  std::map<std::pair<int, int>, std::vector<size_t>> strata;
  for (size_t i = 0; i < ds.records.size(); ++i)
    strata[{ds.records[i].label, ds.records[i].snr_db}].push_back(i);

  Rng rng(mix_seed(seed));
  Split out;
  const int n_classes = ds.n_classes();
  std::vector<std::vector<std::vector<size_t>>> train_by_class(
      static_cast<size_t>(n_classes));  // class -> stratum -> train indices

  for (auto& [key, idxs] : strata) {
    rng.shuffle(idxs);
    const size_t n = idxs.size();
    // Largest-remainder allocation of the stratum across train/val/test.
    std::array<size_t, 3> base;
    std::array<double, 3> rem;
    size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
      const double exact = ratios[static_cast<size_t>(i)] * static_cast<double>(n);
      base[static_cast<size_t>(i)] = static_cast<size_t>(exact);
      rem[static_cast<size_t>(i)] = exact - static_cast<double>(base[static_cast<size_t>(i)]);
      assigned += base[static_cast<size_t>(i)];
    }
    for (size_t left = n - assigned; left > 0; --left) {
      int best = 0;
      for (int i = 1; i < 3; ++i)
        if (rem[static_cast<size_t>(i)] > rem[static_cast<size_t>(best)]) best = i;
      ++base[static_cast<size_t>(best)];
      rem[static_cast<size_t>(best)] = -1.0;
    }
    size_t pos = 0;
    std::vector<size_t> train_part;
    for (size_t i = 0; i < base[0]; ++i) train_part.push_back(idxs[pos++]);
    for (size_t i = 0; i < base[1]; ++i) out.val.push_back(ds.records[idxs[pos++]].id);
    for (size_t i = 0; i < base[2]; ++i) out.test.push_back(ds.records[idxs[pos++]].id);
    train_by_class[static_cast<size_t>(key.first)].push_back(std::move(train_part));
  }

  size_t total_train = 0;
  for (const auto& cls : train_by_class)
    for (const auto& st : cls) total_train += st.size();

  // Trusted quota per (class, stratum).
  std::vector<std::vector<size_t>> quota(static_cast<size_t>(n_classes));
  if (trusted_per_class > 0) {
    for (int c = 0; c < n_classes; ++c) {
      auto& cls = train_by_class[static_cast<size_t>(c)];
      quota[static_cast<size_t>(c)].assign(cls.size(), 0);
      size_t avail = 0;
      for (const auto& st : cls) avail += st.size();
      if (avail < static_cast<size_t>(trusted_per_class))
        fail(ErrorCode::InsufficientTrusted,
             "class " + ds.manifest.class_names[static_cast<size_t>(c)] + " has only " +
                 std::to_string(avail) + " training samples, need " +
                 std::to_string(trusted_per_class));
      // Round-robin across strata so trusted samples cover the SNR grid.
      size_t left = static_cast<size_t>(trusted_per_class);
      size_t s = 0;
      while (left > 0) {
        auto& q = quota[static_cast<size_t>(c)][s % cls.size()];
        if (q < cls[s % cls.size()].size()) {
          ++q;
          --left;
        }
        ++s;
      }
    }
  } else {
    // floor per stratum + largest remainders toward round(frac * total).
    std::vector<std::pair<double, std::pair<int, size_t>>> remainders;
    size_t assigned = 0;
    for (int c = 0; c < n_classes; ++c) {
      auto& cls = train_by_class[static_cast<size_t>(c)];
      quota[static_cast<size_t>(c)].assign(cls.size(), 0);
      for (size_t s = 0; s < cls.size(); ++s) {
        const double exact = trusted_fraction * static_cast<double>(cls[s].size());
        quota[static_cast<size_t>(c)][s] = static_cast<size_t>(exact);
        assigned += quota[static_cast<size_t>(c)][s];
        remainders.push_back({exact - std::floor(exact), {c, s}});
      }
    }
    const size_t target =
        static_cast<size_t>(std::llround(trusted_fraction * static_cast<double>(total_train)));
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& r : remainders) {
      if (assigned >= target) break;
      auto& q = quota[static_cast<size_t>(r.second.first)][r.second.second];
      if (q < train_by_class[static_cast<size_t>(r.second.first)][r.second.second].size()) {
        ++q;
        ++assigned;
      }
    }
    // Every class contributes at least one trusted sample.
    std::vector<std::string> starved;
    for (int c = 0; c < n_classes; ++c) {
      auto& cls = train_by_class[static_cast<size_t>(c)];
      size_t got = 0, avail = 0;
      for (size_t s = 0; s < cls.size(); ++s) {
        got += quota[static_cast<size_t>(c)][s];
        avail += cls[s].size();
      }
      if (got > 0) continue;
      if (avail == 0) {
        starved.push_back(ds.manifest.class_names[static_cast<size_t>(c)]);
        continue;
      }
      size_t best = 0;
      for (size_t s = 1; s < cls.size(); ++s)
        if (cls[s].size() > cls[best].size()) best = s;
      quota[static_cast<size_t>(c)][best] = 1;
    }
    if (!starved.empty()) {
      std::string msg = "no trainable trusted sample for class(es):";
      for (const auto& s : starved) msg += " " + s;
      fail(ErrorCode::InsufficientTrusted, msg);
    }
  }

  for (int c = 0; c < n_classes; ++c) {
    auto& cls = train_by_class[static_cast<size_t>(c)];
    for (size_t s = 0; s < cls.size(); ++s) {
      for (size_t i = 0; i < cls[s].size(); ++i) {
        const uint64_t id = ds.records[cls[s][i]].id;
        if (i < quota[static_cast<size_t>(c)][s])
          out.trusted.push_back(id);
        else
          out.untrusted.push_back(id);
      }
    }
  }
  std::sort(out.trusted.begin(), out.trusted.end());
  std::sort(out.untrusted.begin(), out.untrusted.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace tshn::sig
