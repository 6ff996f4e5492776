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

#ifndef KGNMT_KB_RECORDS_HPP_
#define KGNMT_KB_RECORDS_HPP_

#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/kb/label_index.hpp"
#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::kb {

enum class KgeMode { structure, semantic };

std::string_view to_string(KgeMode mode);
KgeMode parse_kge_mode(std::string_view s);

// One classification example: a bag of input tokens and the label to predict.
struct KgeRecord {
  std::vector<std::string> features;
  std::string label;
  friend bool operator==(const KgeRecord&, const KgeRecord&) = default;
};

struct KgeRecordSet {
  std::vector<KgeRecord> records;
  std::vector<std::string> warnings;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

// Last path segment of an IRI (after '#' or '/').
std::string_view localname(std::string_view iri);

// Localname with `prefix`, bytes outside [A-Za-z0-9_()] percent-encoded.
std::string uri_token(std::string_view iri, std::string_view prefix);

// Maps graph IRIs to whitespace-free record tokens.
struct TokenNamer {
  std::function<std::string(std::string_view)> entity;
  std::function<std::string(std::string_view)> relation;

  static TokenNamer identity();
};

// Entities that are subjects of `kb_tgt` get `tgt_prefix`, every other
// entity `src_prefix`; relations become "rel_<localname>".
TokenNamer linked_data_namer(const TripleSet& kb_tgt,
                             std::string src_prefix = "dbr_",
                             std::string tgt_prefix = "dbr_de_");

// Normalized label words of a literal.
std::vector<std::string> label_words(std::string_view label);

struct RecordOptions {
  std::set<std::string> label_relations = default_label_relations();
  TokenNamer namer = TokenNamer::identity();
};

// Structure mode: ({h, r} -> t) and ({t, r} -> h) per IRI-object triple.
// Semantic mode additionally appends the input-side entity's label words
// (dropped first when the bag exceeds max_bag) and emits
// ({label words} -> entity) per label triple. Other literal triples are
// skipped.
KgeRecordSet triples_to_records(const TripleSet& kb, KgeMode mode,
                                std::size_t max_bag,
                                const RecordOptions& options = {});

TripleSet merge(const TripleSet& a, const TripleSet& b);

// "feature feature ...<TAB>label" per line.
void write_records(std::ostream& out, const KgeRecordSet& records);
KgeRecordSet read_records(std::istream& in);

}  // namespace kgnmt::kb

#endif  // KGNMT_KB_RECORDS_HPP_
