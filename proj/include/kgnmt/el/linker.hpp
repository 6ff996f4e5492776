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

#ifndef KGNMT_EL_LINKER_HPP_
#define KGNMT_EL_LINKER_HPP_

#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/common/text.hpp"
#include "kgnmt/kb/label_index.hpp"
#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::el {

using kb::Candidate;

// A candidate span [start, end) of a tokenized sentence.
struct Mention {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;  // original tokens joined by single spaces
  std::vector<Candidate> candidates;
};

// Greedy leftmost-longest matching of token windows (max_span down to 1)
// against the index; matched spans are consumed.
std::vector<Mention> detect_mentions(std::span<const std::string> tokens,
                                     const kb::LabelIndex& index, std::size_t max_span = 5);

// Per-entity disambiguation context: the normalized words of the entity's
// own labels and of the labels of its graph neighbours.
class EntityContext {
 public:
  EntityContext() = default;
  EntityContext(const kb::TripleSet& kb,
                const std::set<std::string>& label_relations = kb::default_label_relations());

  const std::set<std::string>* words(std::string_view entity) const;

 private:
  std::map<std::string, std::set<std::string>, std::less<>> words_;
};

// argmax over candidates of (context overlap, prior), lexicographically
// smallest IRI on full ties. `context` holds the sentence tokens.
// Throws if the mention has no candidates.
std::string disambiguate(const Mention& mention, std::span<const std::string> context,
                         const EntityContext& entity_context);

// Escaping applied to tokens of annotated corpora: '\' -> "\\", '|' -> "\|"
// and, inside annotation surfaces, '_' -> "\_".
std::string escape_token(std::string_view token);
std::string unescape_token(std::string_view token);

// Position of the last unescaped '|', or npos.
std::size_t annotation_bar(std::string_view token);
bool is_annotation_token(std::string_view token);

// "surface_with_underscores|uri_token"
std::string make_annotation(std::span<const std::string> surface_tokens,
                            std::string_view uri_token);

// Surface part of an annotated token, unescaped and with underscores
// turned back into spaces; non-annotated tokens are just unescaped.
std::string annotation_surface(std::string_view token);
// URI part of an annotated token; empty for plain tokens.
std::string annotation_uri(std::string_view token);

// Replaces every annotated token by its original tokens.
Sentence strip_annotations(std::span<const std::string> tokens);

struct AnnotationStats {
  std::size_t mentions_detected = 0;
  std::size_t mentions_linked = 0;
  std::size_t ambiguous_resolved = 0;

  AnnotationStats& operator+=(const AnnotationStats& o);
};

// Linker for one language side.
class EntityLinker {
 public:
  EntityLinker(const kb::TripleSet& kb, std::string uri_prefix, std::size_t max_span = 5,
               const std::set<std::string>& label_relations = kb::default_label_relations());

  const kb::LabelIndex& index() const { return index_; }
  const std::string& prefix() const { return prefix_; }

  Sentence annotate(std::span<const std::string> tokens, AnnotationStats* stats = nullptr) const;

 private:
  kb::LabelIndex index_;
  EntityContext context_;
  std::string prefix_;
  std::size_t max_span_;
};

struct ParallelCorpus {
  std::vector<Sentence> source;
  std::vector<Sentence> target;
};

struct AnnotatedParallelCorpus {
  ParallelCorpus corpus;
  AnnotationStats source_stats;
  AnnotationStats target_stats;
};

// Links each side independently. Throws if the sides differ in length.
AnnotatedParallelCorpus annotate_corpus(const ParallelCorpus& corpus,
                                        const EntityLinker& source_linker,
                                        const EntityLinker& target_linker);

// mentions_detected / mentions_linked / ambiguous_resolved, one per line.
void write_stats(std::ostream& out, const AnnotationStats& stats, std::string_view side = {});

}  // namespace kgnmt::el

#endif  // KGNMT_EL_LINKER_HPP_
