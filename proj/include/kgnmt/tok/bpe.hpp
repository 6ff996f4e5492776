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

#ifndef KGNMT_TOK_BPE_HPP_
#define KGNMT_TOK_BPE_HPP_

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgnmt/common/text.hpp"

namespace kgnmt::tok {

inline constexpr std::string_view kEndOfWord = "</w>";

// Tokens for which this returns true are never segmented.
using ProtectedPredicate = std::function<bool(std::string_view)>;

// Annotation tokens (an unescaped '|') are protected by default.
ProtectedPredicate annotation_tokens();
ProtectedPredicate nothing_protected();

class MergeTable {
 public:
  using Pair = std::pair<std::string, std::string>;

  // Throws on a duplicate pair.
  void add(std::string left, std::string right);

  const std::vector<Pair>& merges() const { return merges_; }
  std::size_t size() const { return merges_.size(); }
  bool empty() const { return merges_.empty(); }
  std::optional<int> rank(const std::string& left, const std::string& right) const;

 private:
  std::vector<Pair> merges_;
  std::map<Pair, int> rank_;
};

// Symbols of a word before any merge: code points, the last carrying
// the end-of-word marker.
std::vector<std::string> initial_symbols(std::string_view word);

// Classic BPE: repeatedly merges the most frequent adjacent pair (ties go to
// the lexicographically smallest pair) until num_merges merges are learned
// or no pair reaches min_frequency. Protected tokens are not counted.
MergeTable learn_bpe(std::span<const std::string> tokens, int num_merges,
                     const ProtectedPredicate& is_protected = annotation_tokens(),
                     int min_frequency = 2);
MergeTable learn_bpe(std::span<const Sentence> corpus, int num_merges,
                     const ProtectedPredicate& is_protected = annotation_tokens(),
                     int min_frequency = 2);

// Applies merges by rank within each word, memoizing segmentations.
class BpeEncoder {
 public:
  explicit BpeEncoder(MergeTable merges,
                      ProtectedPredicate is_protected = annotation_tokens());

  const std::vector<std::string>& segment(const std::string& word);
  Sentence apply(std::span<const std::string> tokens);

 private:
  MergeTable merges_;
  ProtectedPredicate is_protected_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

Sentence apply_bpe(std::span<const std::string> tokens, const MergeTable& merges,
                   const ProtectedPredicate& is_protected = annotation_tokens());

// Joins subwords back into words by the end-of-word marker. Protected
// tokens at a word boundary are emitted as whole words.
Sentence debpe(std::span<const std::string> subwords,
               const ProtectedPredicate& is_protected = annotation_tokens());

// "#bpe v1" header, then "left right" per line in learning order.
void write_merges(std::ostream& out, const MergeTable& merges);
MergeTable read_merges(std::istream& in);

}  // namespace kgnmt::tok

#endif  // KGNMT_TOK_BPE_HPP_
