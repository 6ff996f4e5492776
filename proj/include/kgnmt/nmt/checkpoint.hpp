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

#ifndef KGNMT_NMT_CHECKPOINT_HPP_
#define KGNMT_NMT_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "kgnmt/nmt/model.hpp"

namespace kgnmt::nmt {

// Checkpoint layout (all integers little-endian):
//   bytes 0..7   "KGNMTCKP"
//   uint32       format version (1)
//   uint64       header length H
//   H bytes      JSON header: model config, vocabulary sizes and hashes,
//                scalar type, free-form metadata and the tensor directory
//                [{name, rows, cols, offset}] with offsets in bytes from the
//                start of the data section
//   data         column-major tensors, 4-byte (f32) or 8-byte (f64) IEEE
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointInfo {
  ModelConfig model;
  int src_vocab = 0;
  int tgt_vocab = 0;
  std::uint64_t src_vocab_hash = 0;
  std::uint64_t tgt_vocab_hash = 0;
  std::map<std::string, std::string> meta;
};

template <typename S>
struct Checkpoint {
  CheckpointInfo info;
  std::unique_ptr<Seq2Seq<S>> model;
};

template <typename S>
void save_checkpoint(const std::string& path, const Seq2Seq<S>& model, std::uint64_t src_vocab_hash,
                     std::uint64_t tgt_vocab_hash,
                     const std::map<std::string, std::string>& meta = {});

// Throws FormatError on a bad magic, version, header or truncated data.
template <typename S>
Checkpoint<S> load_checkpoint(const std::string& path);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_CHECKPOINT_HPP_
