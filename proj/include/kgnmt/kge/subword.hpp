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

#ifndef KGNMT_KGE_SUBWORD_HPP_
#define KGNMT_KGE_SUBWORD_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kgnmt::kge {

// Character n-grams of "<token>" for n in [min_n, max_n], grouped by
// length (shorter first), left to right within a length. Characters are
// UTF-8 code points.
std::vector<std::string> subword_ngrams(std::string_view token, int min_n, int max_n);

// FNV-1a (32 bit) of the n-gram bytes modulo `buckets`.
std::uint32_t subword_bucket(std::string_view ngram, std::uint32_t buckets);

}  // namespace kgnmt::kge

#endif  // KGNMT_KGE_SUBWORD_HPP_
