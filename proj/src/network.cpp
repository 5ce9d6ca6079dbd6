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

#include "network.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace tshn::nn {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'C', 'K'};
constexpr uint16_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorCode::IoError, "truncated checkpoint");
  return v;
}

void write_blob(std::ostream& os, const std::string& name, const std::vector<float>& data) {
  write_pod<uint16_t>(os, static_cast<uint16_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_pod<uint32_t>(os, static_cast<uint32_t>(data.size()));
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(float)));
}

std::pair<std::string, std::vector<float>> read_blob(std::istream& is) {
  const uint16_t name_len = read_pod<uint16_t>(is);
  std::string name(name_len, '\0');
  is.read(name.data(), name_len);
  const uint32_t numel = read_pod<uint32_t>(is);
  std::vector<float> data(numel);
  is.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(numel * sizeof(float)));
  if (!is) fail(ErrorCode::IoError, "truncated checkpoint blob");
  return {std::move(name), std::move(data)};
}

}  // namespace

void save_checkpoint(const std::string& path, const Embedding<float>& net,
                     const Optimizer<float>* opt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_pod<uint16_t>(os, kVersion);
  nlohmann::json meta = {
      {"n_classes", net.cfg.n_classes},       {"sample_len", net.cfg.sample_len},
      {"conv1_filters", net.cfg.conv1_filters}, {"conv2_filters", net.cfg.conv2_filters},
      {"feat_dim", net.cfg.feat_dim},         {"dropout", net.cfg.dropout},
      {"conv_padding", "valid"},
  };
  const std::string meta_str = meta.dump();
  write_pod<uint32_t>(os, static_cast<uint32_t>(meta_str.size()));
  os.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

  const auto names = Embedding<float>::param_names();
  const auto params = net.params();
  write_pod<uint32_t>(os, static_cast<uint32_t>(params.size()));
  for (size_t i = 0; i < params.size(); ++i) write_blob(os, names[i], params[i]->data);

  write_pod<uint8_t>(os, opt ? 1 : 0);
  if (opt) {
    write_pod<uint8_t>(os, opt->kind == OptKind::Adam ? 1 : 0);
    write_pod<double>(os, opt->lr);
    write_pod<double>(os, opt->beta1);
    write_pod<double>(os, opt->beta2);
    write_pod<double>(os, opt->eps);
    write_pod<uint64_t>(os, static_cast<uint64_t>(opt->step_count));
    write_pod<uint32_t>(os, static_cast<uint32_t>(opt->m.size() * 2));
    for (size_t i = 0; i < opt->m.size(); ++i) {
      write_blob(os, "m." + names[i], opt->m[i]);
      write_blob(os, "v." + names[i], opt->v[i]);
    }
  }
  if (!os) fail(ErrorCode::IoError, "failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::IoError, "cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    fail(ErrorCode::IoError, "not a checkpoint file: " + path);
  const uint16_t version = read_pod<uint16_t>(is);
  if (version != kVersion)
    fail(ErrorCode::IoError, "unsupported checkpoint version " + std::to_string(version));
  const uint32_t meta_len = read_pod<uint32_t>(is);
  std::string meta_str(meta_len, '\0');
  is.read(meta_str.data(), meta_len);
  nlohmann::json meta = nlohmann::json::parse(meta_str);

  NetConfig cfg;
  cfg.n_classes = meta.at("n_classes").get<int>();
  cfg.sample_len = meta.at("sample_len").get<int>();
  cfg.conv1_filters = meta.at("conv1_filters").get<int>();
  cfg.conv2_filters = meta.at("conv2_filters").get<int>();
  cfg.feat_dim = meta.at("feat_dim").get<int>();
  cfg.dropout = meta.at("dropout").get<double>();

  Checkpoint ck{Embedding<float>(cfg), std::nullopt, meta_str};
  const auto names = Embedding<float>::param_names();
  auto params = ck.net.params();
  const uint32_t n_blobs = read_pod<uint32_t>(is);
  if (n_blobs != params.size()) fail(ErrorCode::IoError, "unexpected parameter blob count");
  for (uint32_t i = 0; i < n_blobs; ++i) {
    auto [name, data] = read_blob(is);
    if (name != names[i] || data.size() != params[i]->data.size())
      fail(ErrorCode::IoError, "checkpoint blob mismatch at '" + name + "'");
    params[i]->data = std::move(data);
  }

  if (read_pod<uint8_t>(is)) {
    Optimizer<float> opt;
    opt.kind = read_pod<uint8_t>(is) ? OptKind::Adam : OptKind::Sgd;
    opt.lr = read_pod<double>(is);
    opt.beta1 = read_pod<double>(is);
    opt.beta2 = read_pod<double>(is);
    opt.eps = read_pod<double>(is);
    opt.step_count = static_cast<int64_t>(read_pod<uint64_t>(is));
    const uint32_t n_moments = read_pod<uint32_t>(is);
    for (uint32_t i = 0; i < n_moments / 2; ++i) {
      opt.m.push_back(read_blob(is).second);
      opt.v.push_back(read_blob(is).second);
    }
    ck.opt = std::move(opt);
  }
  return ck;
}

}  // namespace tshn::nn
