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

#include "kgnmt/tok/vocab.hpp"

#include <algorithm>
#include <map>

#include "kgnmt/common/error.hpp"

namespace kgnmt::tok {

Vocabulary::Vocabulary() {
  for (auto t : {kPadToken, kUnkToken, kBosToken, kEosToken}) push(std::string(t));
}

void Vocabulary::push(std::string token) {
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.contains(std::string(token));
}

Vocabulary Vocabulary::extended(std::span<const std::string> extra) const {
  Vocabulary v = *this;
  std::size_t added = 0;
  for (const auto& t : extra) {
    if (t.empty() || v.contains(t)) continue;
    v.push(t);
    ++added;
  }
  if (max_size_ != std::numeric_limits<std::size_t>::max()) {
    v.max_size_ = std::max(max_size_, tokens_.size()) + added;
  }
  return v;
}

std::uint64_t Vocabulary::hash() const {
  std::string all;
  for (const auto& t : tokens_) {
    all += t;
    all += '\n';
  }
  return fnv1a64(all);
}

Vocabulary build_vocab(std::span<const Sentence> corpus, std::size_t max_size) {
  if (max_size <= 4) throw Error("build_vocab: max_size must exceed the 4 reserved tokens");
  std::map<std::string, std::size_t> counts;
  Vocabulary reserved;
  for (const auto& s : corpus) {
    for (const auto& t : s) {
      if (!reserved.contains(t)) ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  v.max_size_ = max_size;
  for (auto& [tok, c] : ranked) {
    if (v.size() >= max_size) break;
    v.push(tok);
  }
  return v;
}

std::vector<int> numericalize(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id(t));
  return ids;
}

Sentence denumericalize(std::span<const int> ids, const Vocabulary& vocab) {
  Sentence out;
  for (int id : ids) {
    if (id == Vocabulary::kPad || id == Vocabulary::kBos || id == Vocabulary::kEos) continue;
    out.push_back(vocab.token(id));
  }
  return out;
}

void write_vocab(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& t : vocab.tokens()) out << t << '\n';
}

Vocabulary read_vocab(std::istream& in) {
  const auto lines = read_lines(in);
  Vocabulary v;
  if (lines.size() < 4) throw FormatError("vocabulary must start with the 4 reserved tokens", 1);
  for (std::size_t i = 0; i < 4; ++i) {
    if (lines[i] != v.tokens()[i]) {
      throw FormatError("expected reserved token " + v.tokens()[i], i + 1);
    }
  }
  for (std::size_t i = 4; i < lines.size(); ++i) {
    if (lines[i].empty()) throw FormatError("empty token", i + 1);
    if (v.contains(lines[i])) throw FormatError("duplicate token " + lines[i], i + 1);
    v.push(lines[i]);
  }
  v.max_size_ = v.size();
  return v;
}

}  // namespace kgnmt::tok
