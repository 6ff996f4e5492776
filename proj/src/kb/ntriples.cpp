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

#include "kgnmt/kb/ntriples.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::kb {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : s_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_no_, pos_ + 1);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  void expect_ws() {
    if (at_end() || (s_[pos_] != ' ' && s_[pos_] != '\t')) {
      fail("expected whitespace");
    }
    skip_ws();
  }

  std::uint32_t hex_escape(std::size_t digits) {
    if (pos_ + digits > s_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (std::size_t k = 0; k < digits; ++k) {
      const char c = s_[pos_ + k];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= c - '0';
      else if (c >= 'a' && c <= 'f') cp |= c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') cp |= c - 'A' + 10;
      else fail("bad hex digit in unicode escape");
    }
    pos_ += digits;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      fail("unicode escape out of range");
    }
    return cp;
  }

  Iri iri_ref() {
    if (peek() != '<') fail("expected '<'");
    ++pos_;
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      const char c = s_[pos_];
      if (c == '>') break;
      if (c == '\\') {
        ++pos_;
        const char e = peek();
        ++pos_;
        if (e == 'u') append_utf8(value, hex_escape(4));
        else if (e == 'U') append_utf8(value, hex_escape(8));
        else fail("bad escape in IRI");
        continue;
      }
      if (c == ' ' || c == '\t' || c == '<' || c == '"' || c == '{' ||
          c == '}' || c == '|' || c == '^' || c == '`') {
        fail("illegal character in IRI");
      }
      value += c;
      ++pos_;
    }
    ++pos_;
    if (value.empty()) fail("empty IRI");
    return Iri{std::move(value)};
  }

  Iri blank_node() {
    if (s_.substr(pos_, 2) != "_:") fail("expected blank node");
    const std::size_t start = pos_;
    pos_ += 2;
    while (!at_end() && s_[pos_] != ' ' && s_[pos_] != '\t' &&
           s_[pos_] != '.') {
      ++pos_;
    }
    // A trailing '.' directly after a label belongs to the statement.
    if (pos_ == start + 2) fail("empty blank node label");
    return Iri{std::string(s_.substr(start, pos_ - start))};
  }

  Iri node() {
    if (peek() == '<') return iri_ref();
    if (peek() == '_') return blank_node();
    fail("expected IRI or blank node");
  }

  Literal literal() {
    ++pos_;  // opening quote
    Literal lit;
    while (true) {
      if (at_end()) fail("unterminated literal");
      const char c = s_[pos_];
      if (c == '"') break;
      if (c == '\\') {
        ++pos_;
        if (at_end()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"': lit.text += '"'; break;
          case '\\': lit.text += '\\'; break;
          case '\'': lit.text += '\''; break;
          case 'n': lit.text += '\n'; break;
          case 't': lit.text += '\t'; break;
          case 'r': lit.text += '\r'; break;
          case 'b': lit.text += '\b'; break;
          case 'f': lit.text += '\f'; break;
          case 'u': append_utf8(lit.text, hex_escape(4)); break;
          case 'U': append_utf8(lit.text, hex_escape(8)); break;
          default: --pos_; fail("unknown escape");
        }
        continue;
      }
      lit.text += c;
      ++pos_;
    }
    ++pos_;
    if (peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                           s_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ == start) fail("empty language tag");
      std::string tag(s_.substr(start, pos_ - start));
      tag = tag.substr(0, tag.find('-'));
      for (auto& ch : tag) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      lit.lang = std::move(tag);
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      lit.datatype = iri_ref().value;
    }
    return lit;
  }

  Triple statement() {
    skip_ws();
    Triple t;
    t.subject = node();
    expect_ws();
    t.relation = iri_ref();
    expect_ws();
    if (peek() == '"') t.object = literal();
    else t.object = node();
    skip_ws();
    if (peek() != '.') fail("expected '.' terminating the statement");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing characters after '.'");
    return t;
  }

 private:
  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

bool blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == ' ' || c == '\t') continue;
    return c == '#';
  }
  return true;
}

std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default: out += c;
    }
  }
  return out;
}

std::string node_text(const Iri& n) {
  return n.is_blank() ? n.value : "<" + n.value + ">";
}

}  // namespace

Triple parse_ntriples_line(std::string_view line, std::size_t line_no) {
  return LineParser(line, line_no).statement();
}

TripleSet parse_ntriples(std::istream& in, const ParseLimits& limits) {
  TripleSet kb;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() > limits.max_line_length) {
      throw ParseError("line exceeds maximum length", line_no,
                       limits.max_line_length + 1);
    }
    if (!valid_utf8(line)) throw EncodingError(line_no);
    if (blank_or_comment(line)) continue;
    kb.add(parse_ntriples_line(line, line_no));
  }
  return kb;
}

TripleSet parse_ntriples(std::string_view text, const ParseLimits& limits) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in, limits);
}

TripleSet parse_ntriples_file(const std::string& path,
                              const ParseLimits& limits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return parse_ntriples(in, limits);
}

std::string to_ntriples(const Triple& t) {
  std::string out = node_text(t.subject) + " " + node_text(t.relation) + " ";
  if (t.object_is_iri()) {
    out += node_text(t.object_iri());
  } else {
    const auto& lit = t.object_literal();
    out += "\"" + escape_literal(lit.text) + "\"";
    if (!lit.lang.empty()) out += "@" + lit.lang;
    else if (!lit.datatype.empty()) out += "^^<" + lit.datatype + ">";
  }
  return out + " .";
}

void write_ntriples(std::ostream& out, const TripleSet& kb) {
  for (const auto& t : kb) out << to_ntriples(t) << '\n';
}

}  // namespace kgnmt::kb
