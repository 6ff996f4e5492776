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

#include "kgnmt/kb/records.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <unordered_set>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::kb {

std::string_view to_string(KgeMode mode) {
  return mode == KgeMode::structure ? "structure" : "semantic";
}

KgeMode parse_kge_mode(std::string_view s) {
  if (s == "structure") return KgeMode::structure;
  if (s == "semantic") return KgeMode::semantic;
  throw ConfigError("unknown KGE mode '" + std::string(s) +
                    "' (expected structure|semantic)");
}

std::string_view localname(std::string_view iri) {
  const auto pos = iri.find_last_of("/#");
  if (pos == std::string_view::npos || pos + 1 == iri.size()) return iri;
  return iri.substr(pos + 1);
}

std::string uri_token(std::string_view iri, std::string_view prefix) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out(prefix);
  for (unsigned char c : localname(iri)) {
    if (std::isalnum(c) && c < 0x80) {
      out += static_cast<char>(c);
    } else if (c == '_' || c == '(' || c == ')') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

TokenNamer TokenNamer::identity() {
  auto id = [](std::string_view s) { return std::string(s); };
  return {id, id};
}

TokenNamer linked_data_namer(const TripleSet& kb_tgt, std::string src_prefix,
                             std::string tgt_prefix) {
  auto tgt_subjects = std::make_shared<std::unordered_set<std::string>>();
  for (const auto& t : kb_tgt) tgt_subjects->insert(t.subject.value);
  TokenNamer namer;
  namer.entity = [tgt_subjects, src_prefix, tgt_prefix](std::string_view iri) {
    if (iri.starts_with("_:")) return std::string(iri);
    const bool tgt = tgt_subjects->contains(std::string(iri));
    return uri_token(iri, tgt ? tgt_prefix : src_prefix);
  };
  namer.relation = [](std::string_view iri) { return uri_token(iri, "rel_"); };
  return namer;
}

std::vector<std::string> label_words(std::string_view label) {
  return split_ws(normalize_surface(label));
}

namespace {

void append_unique(std::vector<std::string>& bag, const std::string& tok,
                   std::size_t max_bag) {
  if (bag.size() >= max_bag) return;
  if (std::find(bag.begin(), bag.end(), tok) != bag.end()) return;
  bag.push_back(tok);
}

}  // namespace

KgeRecordSet triples_to_records(const TripleSet& kb, KgeMode mode,
                                std::size_t max_bag,
                                const RecordOptions& options) {
  if (kb.empty()) throw Error("triples_to_records: empty knowledge base");
  if (max_bag < 2) throw ConfigError("triples_to_records: max_bag must be >= 2");

  KgeRecordSet out;
  const auto& namer = options.namer;
  const bool semantic = mode == KgeMode::semantic;

  std::map<std::string, std::vector<std::string>> words_of;
  std::size_t label_triples = 0;
  if (semantic) {
    for (const auto& [entity, labels] : entity_labels(kb, options.label_relations)) {
      auto& words = words_of[entity];
      for (const auto& l : labels) {
        for (auto& w : label_words(l)) {
          if (std::find(words.begin(), words.end(), w) == words.end()) {
            words.push_back(std::move(w));
          }
        }
      }
    }
  }

  auto bag_for = [&](const std::string& entity_iri, const std::string& rel_tok) {
    std::vector<std::string> bag{namer.entity(entity_iri), rel_tok};
    if (semantic) {
      if (auto it = words_of.find(entity_iri); it != words_of.end()) {
        for (const auto& w : it->second) append_unique(bag, w, max_bag);
      }
    }
    return bag;
  };

  for (const auto& t : kb) {
    if (t.object_is_iri()) {
      const std::string rel = namer.relation(t.relation.value);
      const std::string& h = t.subject.value;
      const std::string& tail = t.object_iri().value;
      out.records.push_back({bag_for(h, rel), namer.entity(tail)});
      out.records.push_back({bag_for(tail, rel), namer.entity(h)});
      continue;
    }
    if (!options.label_relations.contains(t.relation.value)) continue;
    ++label_triples;
    if (!semantic) continue;
    std::vector<std::string> bag;
    for (const auto& w : label_words(t.object_literal().text)) {
      append_unique(bag, w, max_bag);
    }
    if (!bag.empty()) out.records.push_back({std::move(bag), namer.entity(t.subject.value)});
  }

  if (semantic && label_triples == 0) {
    out.warnings.push_back(
        "semantic mode: knowledge base has no label triples; only structure "
        "records emitted");
  }
  return out;
}

TripleSet merge(const TripleSet& a, const TripleSet& b) {
  TripleSet out;
  for (const auto& t : a) out.add(t);
  for (const auto& t : b) out.add(t);
  return out;
}

void write_records(std::ostream& out, const KgeRecordSet& records) {
  for (const auto& r : records.records) {
    out << join(r.features, " ") << '\t' << r.label << '\n';
  }
}

KgeRecordSet read_records(std::istream& in) {
  KgeRecordSet out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(in)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw FormatError("expected features<TAB>label", line_no);
    }
    KgeRecord r{split_ws(std::string_view(line).substr(0, tab)), line.substr(tab + 1)};
    if (r.features.empty() || r.label.empty() ||
        r.label.find_first_of(" \t") != std::string::npos) {
      throw FormatError("record needs at least one feature and one label token", line_no);
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace kgnmt::kb
