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

#ifndef KGNMT_KB_TRIPLE_SET_HPP_
#define KGNMT_KB_TRIPLE_SET_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace kgnmt::kb {

inline constexpr std::string_view kRdfsLabel =
    "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kOwlSameAs =
    "http://www.w3.org/2002/07/owl#sameAs";

// A graph node: an IRI (brackets stripped) or a blank node kept as the
// opaque token "_:label".
struct Iri {
  std::string value;
  bool is_blank() const { return value.starts_with("_:"); }
  friend bool operator==(const Iri&, const Iri&) = default;
};

struct Literal {
  std::string text;
  std::string lang;      // lowercase primary subtag, or empty
  std::string datatype;  // IRI, or empty
  friend bool operator==(const Literal&, const Literal&) = default;
};

using Object = std::variant<Iri, Literal>;

struct Triple {
  Iri subject;
  Iri relation;
  Object object;

  bool object_is_iri() const { return std::holds_alternative<Iri>(object); }
  const Iri& object_iri() const { return std::get<Iri>(object); }
  const Literal& object_literal() const { return std::get<Literal>(object); }

  friend bool operator==(const Triple&, const Triple&) = default;
};

// Insertion-ordered multiset of triples with incrementally maintained
// entity and relation counts.
class TripleSet {
 public:
  void add(Triple t);

  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  // Distinct IRIs (and blank nodes) in subject or object position.
  std::size_t entity_count() const { return entity_freq_.size(); }
  std::size_t relation_count() const { return relation_freq_.size(); }

  // Number of triples in which the entity occurs (subject or object).
  std::size_t entity_frequency(std::string_view iri) const;
  bool has_entity(std::string_view iri) const;

  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

  friend bool operator==(const TripleSet& a, const TripleSet& b) {
    return a.triples_ == b.triples_;
  }

 private:
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::size_t> entity_freq_;
  std::unordered_map<std::string, std::size_t> relation_freq_;
};

}  // namespace kgnmt::kb

#endif  // KGNMT_KB_TRIPLE_SET_HPP_
