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

#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::kb {

void TripleSet::add(Triple t) {
  ++entity_freq_[t.subject.value];
  if (t.object_is_iri()) {
    // A self-loop counts once for the triple.
    if (t.object_iri().value != t.subject.value) ++entity_freq_[t.object_iri().value];
  }
  ++relation_freq_[t.relation.value];
  triples_.push_back(std::move(t));
}

std::size_t TripleSet::entity_frequency(std::string_view iri) const {
  auto it = entity_freq_.find(std::string(iri));
  return it == entity_freq_.end() ? 0 : it->second;
}

bool TripleSet::has_entity(std::string_view iri) const {
  return entity_freq_.contains(std::string(iri));
}

}  // namespace kgnmt::kb
