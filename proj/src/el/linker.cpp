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

#include "kgnmt/el/linker.hpp"

#include <algorithm>
#include <tuple>

#include "kgnmt/common/error.hpp"
#include "kgnmt/kb/records.hpp"

namespace kgnmt::el {

std::vector<Mention> detect_mentions(std::span<const std::string> tokens,
                                     const kb::LabelIndex& index, std::size_t max_span) {
  if (max_span < 1) throw Error("detect_mentions: max_span must be >= 1");
  std::vector<Mention> out;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    bool matched = false;
    for (std::size_t len = std::min(max_span, n - i); len >= 1; --len) {
      const std::string surface = join(tokens.subspan(i, len), " ");
      if (const auto* cands = index.find(normalize_surface(surface))) {
        out.push_back({i, i + len, surface, *cands});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

EntityContext::EntityContext(const kb::TripleSet& kb,
                             const std::set<std::string>& label_relations) {
  const auto labels = kb::entity_labels(kb, label_relations);
  auto add_words = [&](const std::string& to, const std::string& of) {
    auto it = labels.find(of);
    if (it == labels.end()) return;
    auto& set = words_[to];
    for (const auto& l : it->second) {
      for (auto& w : kb::label_words(l)) set.insert(std::move(w));
    }
  };
  for (const auto& [entity, ls] : labels) add_words(entity, entity);
  for (const auto& t : kb) {
    if (!t.object_is_iri()) continue;
    add_words(t.subject.value, t.object_iri().value);
    add_words(t.object_iri().value, t.subject.value);
  }
}

const std::set<std::string>* EntityContext::words(std::string_view entity) const {
  auto it = words_.find(entity);
  return it == words_.end() ? nullptr : &it->second;
}

std::string disambiguate(const Mention& mention, std::span<const std::string> context,
                         const EntityContext& entity_context) {
  if (mention.candidates.empty()) {
    throw Error("disambiguate: mention '" + mention.surface + "' has no candidates");
  }
  std::set<std::string> ctx;
  for (const auto& tok : context) ctx.insert(normalize_surface(tok));

  const Candidate* best = nullptr;
  std::size_t best_overlap = 0;
  for (const auto& c : mention.candidates) {
    std::size_t overlap = 0;
    if (const auto* words = entity_context.words(c.entity)) {
      for (const auto& w : *words) overlap += ctx.contains(w);
    }
    const bool better =
        !best || std::make_tuple(overlap, c.prior) > std::make_tuple(best_overlap, best->prior) ||
        (overlap == best_overlap && c.prior == best->prior && c.entity < best->entity);
    if (better) {
      best = &c;
      best_overlap = overlap;
    }
  }
  return best->entity;
}

namespace {

std::string escape_impl(std::string_view token, bool underscore) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == '\\' || c == '|' || (underscore && c == '_')) out += '\\';
    out += c;
  }
  return out;
}

// Splits on unescaped `sep`, keeping escapes in the parts.
std::vector<std::string> split_unescaped(std::string_view s, char sep) {
  std::vector<std::string> parts(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      parts.back() += s[i];
      parts.back() += s[++i];
    } else if (s[i] == sep) {
      parts.emplace_back();
    } else {
      parts.back() += s[i];
    }
  }
  return parts;
}

}  // namespace

std::string escape_token(std::string_view token) { return escape_impl(token, false); }

std::string unescape_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '\\' && i + 1 < token.size() &&
        (token[i + 1] == '\\' || token[i + 1] == '|' || token[i + 1] == '_')) {
      out += token[++i];
    } else {
      out += token[i];
    }
  }
  return out;
}

std::size_t annotation_bar(std::string_view token) {
  std::size_t bar = std::string_view::npos;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '\\') {
      ++i;
    } else if (token[i] == '|') {
      bar = i;
    }
  }
  return bar;
}

bool is_annotation_token(std::string_view token) {
  return annotation_bar(token) != std::string_view::npos;
}

std::string make_annotation(std::span<const std::string> surface_tokens,
                            std::string_view uri_token) {
  std::string out;
  for (std::size_t i = 0; i < surface_tokens.size(); ++i) {
    if (i) out += '_';
    out += escape_impl(surface_tokens[i], true);
  }
  out += '|';
  out += uri_token;
  return out;
}

namespace {

std::vector<std::string> surface_tokens(std::string_view token) {
  const auto bar = annotation_bar(token);
  if (bar == std::string_view::npos) return {unescape_token(token)};
  std::vector<std::string> out;
  for (const auto& part : split_unescaped(token.substr(0, bar), '_')) {
    out.push_back(unescape_token(part));
  }
  return out;
}

}  // namespace

std::string annotation_surface(std::string_view token) {
  const auto parts = surface_tokens(token);
  return join(parts, " ");
}

std::string annotation_uri(std::string_view token) {
  const auto bar = annotation_bar(token);
  if (bar == std::string_view::npos) return {};
  return std::string(token.substr(bar + 1));
}

Sentence strip_annotations(std::span<const std::string> tokens) {
  Sentence out;
  for (const auto& tok : tokens) {
    for (auto& s : surface_tokens(tok)) out.push_back(std::move(s));
  }
  return out;
}

AnnotationStats& AnnotationStats::operator+=(const AnnotationStats& o) {
  mentions_detected += o.mentions_detected;
  mentions_linked += o.mentions_linked;
  ambiguous_resolved += o.ambiguous_resolved;
  return *this;
}

EntityLinker::EntityLinker(const kb::TripleSet& kb, std::string uri_prefix, std::size_t max_span,
                           const std::set<std::string>& label_relations)
    : index_(kb::build_label_index(kb, label_relations)),
      context_(kb, label_relations),
      prefix_(std::move(uri_prefix)),
      max_span_(max_span) {}

Sentence EntityLinker::annotate(std::span<const std::string> tokens,
                                AnnotationStats* stats) const {
  const auto mentions = detect_mentions(tokens, index_, max_span_);
  Sentence out;
  std::size_t next = 0;
  for (const auto& m : mentions) {
    for (; next < m.start; ++next) out.push_back(escape_token(tokens[next]));
    const std::string entity = disambiguate(m, tokens, context_);
    out.push_back(make_annotation(tokens.subspan(m.start, m.end - m.start),
                                  kb::uri_token(entity, prefix_)));
    next = m.end;
    if (stats) {
      ++stats->mentions_detected;
      ++stats->mentions_linked;
      if (m.candidates.size() > 1) ++stats->ambiguous_resolved;
    }
  }
  for (; next < tokens.size(); ++next) out.push_back(escape_token(tokens[next]));
  return out;
}

AnnotatedParallelCorpus annotate_corpus(const ParallelCorpus& corpus,
                                        const EntityLinker& source_linker,
                                        const EntityLinker& target_linker) {
  if (corpus.source.size() != corpus.target.size()) {
    throw Error("annotate_corpus: source has " + std::to_string(corpus.source.size()) +
                " lines, target has " + std::to_string(corpus.target.size()));
  }
  AnnotatedParallelCorpus out;
  out.corpus.source.reserve(corpus.source.size());
  out.corpus.target.reserve(corpus.target.size());
  for (const auto& s : corpus.source) {
    out.corpus.source.push_back(source_linker.annotate(s, &out.source_stats));
  }
  for (const auto& t : corpus.target) {
    out.corpus.target.push_back(target_linker.annotate(t, &out.target_stats));
  }
  return out;
}

void write_stats(std::ostream& out, const AnnotationStats& stats, std::string_view side) {
  const std::string p = side.empty() ? "" : std::string(side) + ".";
  out << p << "mentions_detected " << stats.mentions_detected << '\n'
      << p << "mentions_linked " << stats.mentions_linked << '\n'
      << p << "ambiguous_resolved " << stats.ambiguous_resolved << '\n';
}

}  // namespace kgnmt::el
