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

#ifndef KGNMT_KB_LEXICON_HPP_
#define KGNMT_KB_LEXICON_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/kb/label_index.hpp"
#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::kb {

// Source label (normalized) -> target labels (as written in the target KB).
class BilingualLexicon {
 public:
  void add(std::string_view source_label, std::string target_label);

  // Normalizes `source` before lookup.
  const std::set<std::string>* find(std::string_view source) const;
  // Deterministic single translation: the lexicographically first target.
  std::optional<std::string> translate(std::string_view source) const;

  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const std::map<std::string, std::set<std::string>, std::less<>>& entries() const {
    return map_;
  }

 private:
  std::map<std::string, std::set<std::string>, std::less<>> map_;
};

struct SkippedLink {
  std::string source;
  std::string target;
  std::string reason;
};

struct LexiconResult {
  BilingualLexicon lexicon;
  std::vector<SkippedLink> skipped;
};

// Follows sameAs links in either KB (source->target or target->source) and
// pairs every source label with every target label of the linked entity.
LexiconResult extract_bilingual_lexicon(
    const TripleSet& kb_src, const TripleSet& kb_tgt,
    std::string_view sameas_relation = kOwlSameAs,
    const std::set<std::string>& label_relations = default_label_relations());

// One line per skipped link: "skip<TAB>source<TAB>target<TAB>reason".
void write_skip_report(std::ostream& out, const std::vector<SkippedLink>& skipped);

// Lexicon file: "source<TAB>target" per line.
void write_lexicon(std::ostream& out, const BilingualLexicon& lex);
BilingualLexicon read_lexicon(std::istream& in);

}  // namespace kgnmt::kb

#endif  // KGNMT_KB_LEXICON_HPP_
