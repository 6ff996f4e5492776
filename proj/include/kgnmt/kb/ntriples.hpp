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

#ifndef KGNMT_KB_NTRIPLES_HPP_
#define KGNMT_KB_NTRIPLES_HPP_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::kb {

struct ParseLimits {
  std::size_t max_line_length = 1 << 20;
};

// Parses W3C N-Triples, one statement per line. Comments and blank lines
// are skipped. Throws ParseError (1-based line/column) on malformed
// statements and EncodingError on invalid UTF-8.
TripleSet parse_ntriples(std::istream& in, const ParseLimits& limits = {});
TripleSet parse_ntriples(std::string_view text, const ParseLimits& limits = {});
TripleSet parse_ntriples_file(const std::string& path,
                              const ParseLimits& limits = {});

// Parses a single statement; `line_no` is only used for error positions.
Triple parse_ntriples_line(std::string_view line, std::size_t line_no);

void write_ntriples(std::ostream& out, const TripleSet& kb);
std::string to_ntriples(const Triple& t);

}  // namespace kgnmt::kb

#endif  // KGNMT_KB_NTRIPLES_HPP_
