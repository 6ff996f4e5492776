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

#ifndef KGNMT_KB_LABEL_INDEX_HPP_
#define KGNMT_KB_LABEL_INDEX_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::kb {

struct Candidate {
  std::string entity;
  std::uint64_t prior = 0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Normalized surface form -> candidate entities, sorted by prior
// descending, then IRI ascending.
class LabelIndex {
 public:
  using Map = std::map<std::string, std::vector<Candidate>, std::less<>>;

  // `normalized` must already be normalize_surface()'d.
  const std::vector<Candidate>* find(std::string_view normalized) const;
  // Normalizes `surface` before lookup; empty when absent.
  std::vector<Candidate> lookup(std::string_view surface) const;

  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const Map& entries() const { return map_; }

  // Longest label, in whitespace-separated words.
  std::size_t max_label_words() const { return max_words_; }

 private:
  friend LabelIndex build_label_index(const TripleSet&,
                                      const std::set<std::string>&);
  Map map_;
  std::size_t max_words_ = 0;
};

std::set<std::string> default_label_relations();

// Indexes every (entity, label literal) pair under `label_relations`.
// Prior = number of triples the entity occurs in.
LabelIndex build_label_index(
    const TripleSet& kb,
    const std::set<std::string>& label_relations = default_label_relations());

// All label literals of each entity, in KB order.
std::map<std::string, std::vector<std::string>> entity_labels(
    const TripleSet& kb,
    const std::set<std::string>& label_relations = default_label_relations());

}  // namespace kgnmt::kb

#endif  // KGNMT_KB_LABEL_INDEX_HPP_
