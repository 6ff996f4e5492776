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

#include "kgnmt/kb/label_index.hpp"

#include <algorithm>

#include "kgnmt/common/text.hpp"

namespace kgnmt::kb {

std::set<std::string> default_label_relations() {
  return {std::string(kRdfsLabel)};
}

const std::vector<Candidate>* LabelIndex::find(
    std::string_view normalized) const {
  auto it = map_.find(normalized);
  return it == map_.end() ? nullptr : &it->second;
}

std::vector<Candidate> LabelIndex::lookup(std::string_view surface) const {
  const auto* c = find(normalize_surface(surface));
  return c ? *c : std::vector<Candidate>{};
}

LabelIndex build_label_index(const TripleSet& kb,
                             const std::set<std::string>& label_relations) {
  LabelIndex index;
  for (const auto& t : kb) {
    if (t.object_is_iri() || !label_relations.contains(t.relation.value)) {
      continue;
    }
    const std::string key = normalize_surface(t.object_literal().text);
    if (key.empty()) continue;
    auto& cands = index.map_[key];
    const bool seen = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) {
      return c.entity == t.subject.value;
    });
    if (!seen) {
      cands.push_back({t.subject.value, kb.entity_frequency(t.subject.value)});
    }
    index.max_words_ = std::max(index.max_words_, split_ws(key).size());
  }
  for (auto& [key, cands] : index.map_) {
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.prior != b.prior) return a.prior > b.prior;
      return a.entity < b.entity;
    });
  }
  return index;
}

std::map<std::string, std::vector<std::string>> entity_labels(
    const TripleSet& kb, const std::set<std::string>& label_relations) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& t : kb) {
    if (t.object_is_iri() || !label_relations.contains(t.relation.value)) {
      continue;
    }
    auto& labels = out[t.subject.value];
    const auto& text = t.object_literal().text;
    if (std::find(labels.begin(), labels.end(), text) == labels.end()) {
      labels.push_back(text);
    }
  }
  return out;
}

}  // namespace kgnmt::kb
