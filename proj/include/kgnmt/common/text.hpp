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

#ifndef KGNMT_COMMON_TEXT_HPP_
#define KGNMT_COMMON_TEXT_HPP_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgnmt {

std::vector<std::string> split_ws(std::string_view s);
std::string join(std::span<const std::string> parts, std::string_view sep);

bool valid_utf8(std::string_view s);

// Splits a UTF-8 string into code points, each kept as its byte sequence.
// Invalid input is split byte-wise.
std::vector<std::string> utf8_chars(std::string_view s);

// NFC, lowercase, internal whitespace collapsed to one space, trimmed.
std::string normalize_surface(std::string_view s);

// Unicode-aware lowercase (no normalization, no whitespace changes).
std::string lowercase(std::string_view s);

// FNV-1a over the UTF-8 bytes.
std::uint32_t fnv1a32(std::string_view s);
std::uint64_t fnv1a64(std::string_view s);

std::string hex64(std::uint64_t v);

// Shortest decimal form that parses back to the same double.
std::string format_real(double x);

// Reads a whole stream as lines, without trailing '\r'.
std::vector<std::string> read_lines(std::istream& in);
std::vector<std::string> read_lines(const std::string& path);
std::string read_file(const std::string& path);

// Tokenized corpus file: one sentence per line, tokens space-separated.
using Sentence = std::vector<std::string>;
std::vector<Sentence> read_corpus(const std::string& path);
void write_corpus(const std::string& path, std::span<const Sentence> corpus);

}  // namespace kgnmt

#endif  // KGNMT_COMMON_TEXT_HPP_
