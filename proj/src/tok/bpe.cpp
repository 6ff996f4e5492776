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

#include "kgnmt/tok/bpe.hpp"

#include <set>

#include "kgnmt/common/error.hpp"
#include "kgnmt/el/linker.hpp"

namespace kgnmt::tok {

ProtectedPredicate annotation_tokens() {
  return [](std::string_view t) { return el::is_annotation_token(t); };
}

ProtectedPredicate nothing_protected() {
  return [](std::string_view) { return false; };
}

void MergeTable::add(std::string left, std::string right) {
  Pair p{std::move(left), std::move(right)};
  if (rank_.contains(p)) throw Error("duplicate merge '" + p.first + " " + p.second + "'");
  rank_.emplace(p, static_cast<int>(merges_.size()));
  merges_.push_back(std::move(p));
}

std::optional<int> MergeTable::rank(const std::string& left, const std::string& right) const {
  auto it = rank_.find(Pair{left, right});
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> initial_symbols(std::string_view word) {
  auto symbols = utf8_chars(word);
  if (!symbols.empty()) symbols.back() += kEndOfWord;
  return symbols;
}

namespace {

using Pair = MergeTable::Pair;

struct ByCountThenPair {
  bool operator()(const std::pair<long, Pair>& a, const std::pair<long, Pair>& b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  }
};

class PairStats {
 public:
  void adjust(const Pair& p, long delta, std::size_t word) {
    long& c = counts_[p];
    if (c != 0) ranked_.erase({c, p});
    c += delta;
    if (c != 0) ranked_.insert({c, p});
    else counts_.erase(p);
    if (delta > 0) where_[p].insert(word);
  }

  std::optional<std::pair<long, Pair>> best() const {
    if (ranked_.empty()) return std::nullopt;
    return *ranked_.begin();
  }

  std::set<std::size_t> words_with(const Pair& p) const {
    auto it = where_.find(p);
    return it == where_.end() ? std::set<std::size_t>{} : it->second;
  }

 private:
  std::map<Pair, long> counts_;
  std::set<std::pair<long, Pair>, ByCountThenPair> ranked_;
  std::map<Pair, std::set<std::size_t>> where_;
};

void merge_in_place(std::vector<std::string>& symbols, const Pair& p) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == p.first && symbols[i + 1] == p.second) {
      out.push_back(symbols[i] + symbols[i + 1]);
      ++i;
    } else {
      out.push_back(std::move(symbols[i]));
    }
  }
  symbols = std::move(out);
}

MergeTable learn_from_counts(const std::map<std::string, long>& word_counts, int num_merges,
                             int min_frequency) {
  MergeTable table;
  if (num_merges <= 0) return table;

  std::vector<std::vector<std::string>> words;
  std::vector<long> freq;
  for (const auto& [w, c] : word_counts) {
    words.push_back(initial_symbols(w));
    freq.push_back(c);
  }
  PairStats stats;
  auto count_word = [&](std::size_t wi, long sign) {
    const auto& s = words[wi];
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      stats.adjust({s[i], s[i + 1]}, sign * freq[wi], wi);
    }
  };
  for (std::size_t wi = 0; wi < words.size(); ++wi) count_word(wi, +1);

  while (static_cast<int>(table.size()) < num_merges) {
    const auto best = stats.best();
    if (!best || best->first < min_frequency) break;
    const Pair p = best->second;
    for (std::size_t wi : stats.words_with(p)) {
      auto& s = words[wi];
      bool present = false;
      for (std::size_t i = 0; i + 1 < s.size() && !present; ++i) {
        present = s[i] == p.first && s[i + 1] == p.second;
      }
      if (!present) continue;
      count_word(wi, -1);
      merge_in_place(s, p);
      count_word(wi, +1);
    }
    table.add(p.first, p.second);
  }
  return table;
}

}  // namespace

MergeTable learn_bpe(std::span<const std::string> tokens, int num_merges,
                     const ProtectedPredicate& is_protected, int min_frequency) {
  if (num_merges < 0) throw Error("learn_bpe: num_merges must be >= 0");
  std::map<std::string, long> counts;
  for (const auto& t : tokens) {
    if (!t.empty() && !is_protected(t)) ++counts[t];
  }
  return learn_from_counts(counts, num_merges, min_frequency);
}

MergeTable learn_bpe(std::span<const Sentence> corpus, int num_merges,
                     const ProtectedPredicate& is_protected, int min_frequency) {
  if (num_merges < 0) throw Error("learn_bpe: num_merges must be >= 0");
  std::map<std::string, long> counts;
  for (const auto& s : corpus) {
    for (const auto& t : s) {
      if (!t.empty() && !is_protected(t)) ++counts[t];
    }
  }
  return learn_from_counts(counts, num_merges, min_frequency);
}

BpeEncoder::BpeEncoder(MergeTable merges, ProtectedPredicate is_protected)
    : merges_(std::move(merges)), is_protected_(std::move(is_protected)) {}

const std::vector<std::string>& BpeEncoder::segment(const std::string& word) {
  if (auto it = cache_.find(word); it != cache_.end()) return it->second;
  auto symbols = initial_symbols(word);
  while (symbols.size() > 1) {
    int best_rank = -1;
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      if (auto r = merges_.rank(symbols[i], symbols[i + 1]); r && (best_rank < 0 || *r < best_rank)) {
        best_rank = *r;
        best_at = i;
      }
    }
    if (best_rank < 0) break;
    const Pair p{symbols[best_at], symbols[best_at + 1]};
    merge_in_place(symbols, p);
  }
  return cache_.emplace(word, std::move(symbols)).first->second;
}

Sentence BpeEncoder::apply(std::span<const std::string> tokens) {
  Sentence out;
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    if (is_protected_(t)) {
      out.push_back(t);
      continue;
    }
    const auto& seg = segment(t);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

Sentence apply_bpe(std::span<const std::string> tokens, const MergeTable& merges,
                   const ProtectedPredicate& is_protected) {
  BpeEncoder enc(merges, is_protected);
  return enc.apply(tokens);
}

Sentence debpe(std::span<const std::string> subwords, const ProtectedPredicate& is_protected) {
  Sentence out;
  std::string pending;
  bool open = false;
  for (const auto& s : subwords) {
    if (!open && is_protected(s)) {
      out.push_back(s);
      continue;
    }
    if (s.ends_with(kEndOfWord)) {
      pending.append(s, 0, s.size() - kEndOfWord.size());
      out.push_back(std::move(pending));
      pending.clear();
      open = false;
    } else {
      pending += s;
      open = true;
    }
  }
  if (open) out.push_back(std::move(pending));
  return out;
}

void write_merges(std::ostream& out, const MergeTable& merges) {
  out << "#bpe v1\n";
  for (const auto& [l, r] : merges.merges()) out << l << ' ' << r << '\n';
}

MergeTable read_merges(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty() || lines[0] != "#bpe v1") throw FormatError("missing '#bpe v1' header", 1);
  MergeTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto parts = split_ws(lines[i]);
    if (parts.size() != 2) throw FormatError("expected 'left right'", i + 1);
    try {
      table.add(parts[0], parts[1]);
    } catch (const Error& e) {
      throw FormatError(e.what(), i + 1);
    }
  }
  return table;
}

}  // namespace kgnmt::tok
