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

#ifndef KGNMT_TOK_VOCAB_HPP_
#define KGNMT_TOK_VOCAB_HPP_

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgnmt/common/text.hpp"

namespace kgnmt::tok {

// Token <-> id bijection with PAD, UNK, BOS, EOS at ids 0..3.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";
  static constexpr std::string_view kBosToken = "<s>";
  static constexpr std::string_view kEosToken = "</s>";

  Vocabulary();

  std::size_t size() const { return tokens_.size(); }
  std::size_t max_size() const { return max_size_; }

  // UNK id for unknown tokens.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Copy with `extra` tokens appended (skipping known ones); the size limit
  // grows by the number of tokens added.
  Vocabulary extended(std::span<const std::string> extra) const;

  // FNV-1a over the newline-joined token list.
  std::uint64_t hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  friend Vocabulary build_vocab(std::span<const Sentence>, std::size_t);
  friend Vocabulary read_vocab(std::istream&);
  void push(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  std::size_t max_size_ = std::numeric_limits<std::size_t>::max();
};

// Most frequent tokens first (ties lexicographic) up to max_size entries
// including the 4 reserved ones. Throws if max_size <= 4.
Vocabulary build_vocab(std::span<const Sentence> corpus, std::size_t max_size);

std::vector<int> numericalize(std::span<const std::string> tokens, const Vocabulary& vocab);
// UNK maps to "<unk>"; PAD/BOS/EOS are dropped.
Sentence denumericalize(std::span<const int> ids, const Vocabulary& vocab);

// One token per line; line number - 1 = id (reserved tokens first).
void write_vocab(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocab(std::istream& in);

}  // namespace kgnmt::tok

#endif  // KGNMT_TOK_VOCAB_HPP_
