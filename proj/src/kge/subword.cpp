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

#include "kgnmt/kge/subword.hpp"

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::kge {

std::vector<std::string> subword_ngrams(std::string_view token, int min_n, int max_n) {
  if (token.empty()) throw Error("subword_ngrams: empty token");
  if (min_n < 1 || min_n > max_n) {
    throw Error("subword_ngrams: need 1 <= min_n <= max_n");
  }
  std::vector<std::string> chars{"<"};
  for (auto& c : utf8_chars(token)) chars.push_back(std::move(c));
  chars.emplace_back(">");
  const int len = static_cast<int>(chars.size());

  std::vector<std::string> out;
  for (int n = min_n; n <= max_n && n <= len; ++n) {
    for (int i = 0; i + n <= len; ++i) {
      std::string g;
      for (int k = i; k < i + n; ++k) g += chars[k];
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::uint32_t subword_bucket(std::string_view ngram, std::uint32_t buckets) {
  return fnv1a32(ngram) % buckets;
}

}  // namespace kgnmt::kge
