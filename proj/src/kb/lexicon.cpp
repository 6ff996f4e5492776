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

#include "kgnmt/kb/lexicon.hpp"

#include <ostream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::kb {

void BilingualLexicon::add(std::string_view source_label,
                           std::string target_label) {
  map_[normalize_surface(source_label)].insert(std::move(target_label));
}

const std::set<std::string>* BilingualLexicon::find(std::string_view source) const {
  auto it = map_.find(normalize_surface(source));
  return it == map_.end() ? nullptr : &it->second;
}

std::optional<std::string> BilingualLexicon::translate(std::string_view source) const {
  const auto* t = find(source);
  if (!t || t->empty()) return std::nullopt;
  return *t->begin();
}

LexiconResult extract_bilingual_lexicon(
    const TripleSet& kb_src, const TripleSet& kb_tgt,
    std::string_view sameas_relation,
    const std::set<std::string>& label_relations) {
  const auto src_labels = entity_labels(kb_src, label_relations);
  const auto tgt_labels = entity_labels(kb_tgt, label_relations);

  LexiconResult result;
  auto link = [&](const std::string& src, const std::string& tgt) {
    auto s = src_labels.find(src);
    auto t = tgt_labels.find(tgt);
    if (s == src_labels.end()) {
      result.skipped.push_back({src, tgt, "source has no labels"});
      return;
    }
    if (t == tgt_labels.end()) {
      result.skipped.push_back({src, tgt, "target has no labels"});
      return;
    }
    for (const auto& sl : s->second) {
      for (const auto& tl : t->second) result.lexicon.add(sl, tl);
    }
  };

  for (const auto& t : kb_src) {
    if (t.relation.value == sameas_relation && t.object_is_iri()) {
      link(t.subject.value, t.object_iri().value);
    }
  }
  for (const auto& t : kb_tgt) {
    if (t.relation.value == sameas_relation && t.object_is_iri()) {
      link(t.object_iri().value, t.subject.value);
    }
  }
  return result;
}

void write_skip_report(std::ostream& out, const std::vector<SkippedLink>& skipped) {
  for (const auto& s : skipped) {
    out << "skip\t" << s.source << '\t' << s.target << '\t' << s.reason << '\n';
  }
}

void write_lexicon(std::ostream& out, const BilingualLexicon& lex) {
  for (const auto& [src, tgts] : lex.entries()) {
    for (const auto& t : tgts) out << src << '\t' << t << '\n';
  }
}

BilingualLexicon read_lexicon(std::istream& in) {
  BilingualLexicon lex;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(in)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("expected source<TAB>target", line_no);
    lex.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return lex;
}

}  // namespace kgnmt::kb
