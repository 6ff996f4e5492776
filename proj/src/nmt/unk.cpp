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

#include "kgnmt/nmt/unk.hpp"

#include "kgnmt/common/error.hpp"
#include "kgnmt/el/linker.hpp"
#include "kgnmt/tok/vocab.hpp"

namespace kgnmt::nmt {

std::string_view to_string(UnkMode m) {
  switch (m) {
    case UnkMode::off: return "off";
    case UnkMode::copy_only: return "copy";
    case UnkMode::lexicon_then_copy: return "lexicon_then_copy";
  }
  return "off";
}

UnkMode parse_unk_mode(std::string_view s) {
  if (s == "off") return UnkMode::off;
  if (s == "copy" || s == "copy_only") return UnkMode::copy_only;
  if (s == "lexicon_then_copy") return UnkMode::lexicon_then_copy;
  throw ConfigError("unknown unk mode '" + std::string(s) +
                    "' (expected off|copy|lexicon_then_copy)");
}

Sentence unk_replace(std::span<const std::string> output,
                     std::span<const std::vector<double>> attention,
                     std::span<const std::string> source, const kb::BilingualLexicon* lexicon,
                     UnkMode mode) {
  Sentence out;
  for (std::size_t t = 0; t < output.size(); ++t) {
    if (mode == UnkMode::off || output[t] != tok::Vocabulary::kUnkToken || source.empty()) {
      out.push_back(output[t]);
      continue;
    }
    if (t >= attention.size()) throw Error("unk_replace: no attention recorded for step " + std::to_string(t));
    const auto& a = attention[t];
    const std::size_t n = std::min(a.size(), source.size());
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (a[j] > a[best]) best = j;
    }
    const std::string surface = el::annotation_surface(source[best]);
    if (mode == UnkMode::lexicon_then_copy && lexicon) {
      if (auto tr = lexicon->translate(surface)) {
        for (auto& w : split_ws(*tr)) out.push_back(std::move(w));
        continue;
      }
    }
    auto words = split_ws(surface);
    if (words.empty()) words.push_back(source[best]);
    for (auto& w : words) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace kgnmt::nmt
