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

#ifndef KGNMT_NMT_UNK_HPP_
#define KGNMT_NMT_UNK_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/common/text.hpp"
#include "kgnmt/kb/lexicon.hpp"

namespace kgnmt::nmt {

enum class UnkMode { off, copy_only, lexicon_then_copy };

std::string_view to_string(UnkMode m);
// Accepts off, copy (= copy_only), copy_only, lexicon_then_copy.
UnkMode parse_unk_mode(std::string_view s);

// Replaces every "<unk>" at step t by the lexicon translation (if any, and
// in lexicon_then_copy mode) of the source token with the highest weight in
// attention[t], else by that source token with any annotation suffix
// stripped. `attention` has one distribution over source positions per
// output token. Multi-word replacements expand to several tokens.
Sentence unk_replace(std::span<const std::string> output,
                     std::span<const std::vector<double>> attention,
                     std::span<const std::string> source, const kb::BilingualLexicon* lexicon,
                     UnkMode mode);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_UNK_HPP_
