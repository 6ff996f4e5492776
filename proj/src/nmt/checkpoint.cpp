// Copyright 2026 The kgnmt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgnmt/nmt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::nmt {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");

constexpr char kMagic[8] = {'K', 'G', 'N', 'M', 'T', 'C', 'K', 'P'};

template <typename S>
constexpr const char* dtype() {
  return sizeof(S) == 4 ? "f32" : "f64";
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError("truncated checkpoint header in " + path, 1);
  }
  return v;
}

}  // namespace

template <typename S>
void save_checkpoint(const std::string& path, const Seq2Seq<S>& model, std::uint64_t src_hash,
                     std::uint64_t tgt_hash, const std::map<std::string, std::string>& meta) {
  nlohmann::json h;
  h["model"] = to_kv(model.config());
  h["src_vocab"] = model.src_vocab_size();
  h["tgt_vocab"] = model.tgt_vocab_size();
  h["src_vocab_hash"] = hex64(src_hash);
  h["tgt_vocab_hash"] = hex64(tgt_hash);
  h["scalar"] = dtype<S>();
  h["meta"] = meta;
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const Parameter<S>* p : model.parameters()) {
    tensors.push_back({{"name", p->name},
                       {"rows", p->value.rows()},
                       {"cols", p->value.cols()},
                       {"offset", offset}});
    offset += static_cast<std::uint64_t>(p->value.size()) * sizeof(S);
  }
  h["tensors"] = tensors;
  const std::string header = h.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const Parameter<S>* p : model.parameters()) {
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * static_cast<Eigen::Index>(sizeof(S))));
  }
  if (!out) throw Error("failed writing checkpoint " + path);
}

template <typename S>
Checkpoint<S> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError("not a checkpoint (bad magic): " + path, 1);
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version), 1);
  }
  const auto len = get<std::uint64_t>(in, path);
  std::string header(len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(len))) {
    throw FormatError("truncated checkpoint header in " + path, 1);
  }
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what(), 1);
  }
  if (h.value("scalar", "") != dtype<S>()) {
    throw FormatError("checkpoint scalar type " + h.value("scalar", "?") + ", expected " + dtype<S>(), 1);
  }
  Checkpoint<S> ck;
  ck.info.model = model_config_from(h.at("model").get<std::map<std::string, std::string>>());
  ck.info.src_vocab = h.at("src_vocab").get<int>();
  ck.info.tgt_vocab = h.at("tgt_vocab").get<int>();
  ck.info.src_vocab_hash = std::stoull(h.at("src_vocab_hash").get<std::string>(), nullptr, 16);
  ck.info.tgt_vocab_hash = std::stoull(h.at("tgt_vocab_hash").get<std::string>(), nullptr, 16);
  ck.info.meta = h.at("meta").get<std::map<std::string, std::string>>();
  ck.model = make_model<S>(ck.info.model, ck.info.src_vocab, ck.info.tgt_vocab);
  const auto& tensors = h.at("tensors");
  auto params = ck.model->parameters();
  if (tensors.size() != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model has " +
                          std::to_string(params.size()),
                      1);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter<S>& p = *params[i];
    const auto& t = tensors[i];
    if (t.at("name").get<std::string>() != p.name || t.at("rows").get<Eigen::Index>() != p.value.rows() ||
        t.at("cols").get<Eigen::Index>() != p.value.cols()) {
      throw FormatError("tensor " + std::to_string(i) + " (" + t.at("name").get<std::string>() +
                            ") does not match the model layout",
                        1);
    }
    if (!in.read(reinterpret_cast<char*>(p.value.data()),
                 static_cast<std::streamsize>(p.value.size() * static_cast<Eigen::Index>(sizeof(S))))) {
      throw FormatError("truncated tensor data for " + p.name, 1);
    }
  }
  return ck;
}

template void save_checkpoint(const std::string&, const Seq2Seq<float>&, std::uint64_t, std::uint64_t,
                              const std::map<std::string, std::string>&);
template void save_checkpoint(const std::string&, const Seq2Seq<double>&, std::uint64_t, std::uint64_t,
                              const std::map<std::string, std::string>&);
template Checkpoint<float> load_checkpoint(const std::string&);
template Checkpoint<double> load_checkpoint(const std::string&);

}  // namespace kgnmt::nmt
