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

#include "kgnmt/fusion/embedding_table.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::fusion {

void EmbeddingTable::add(std::string token, const Eigen::Ref<const Eigen::VectorXf>& v) {
  if (v.size() != dim_) {
    throw Error("embedding for '" + token + "' has dimension " +
                std::to_string(v.size()) + ", expected " + std::to_string(dim_));
  }
  if (index_.contains(token)) throw Error("duplicate embedding token '" + token + "'");
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), v.data(), v.data() + v.size());
}

int EmbeddingTable::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

namespace {

bool parse_float(std::string_view s, float& out) {
  // from_chars for float is available in libstdc++ 11.
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable read_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError("missing header", line_no);
  const auto header = split_ws(line);
  long count = -1, dim = -1;
  if (header.size() != 2) throw FormatError("header must be 'count dim'", line_no);
  try {
    count = std::stol(header[0]);
    dim = std::stol(header[1]);
  } catch (const std::exception&) {
    throw FormatError("header must be 'count dim'", line_no);
  }
  if (count < 0 || dim <= 0) throw FormatError("bad header values", line_no);

  EmbeddingTable table(static_cast<int>(dim));
  Eigen::VectorXf v(dim);
  long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_ws(line);
    if (static_cast<long>(fields.size()) != dim + 1) {
      throw FormatError("expected token and " + std::to_string(dim) +
                            " values, got " + std::to_string(fields.size()) + " fields",
                        line_no);
    }
    for (long k = 0; k < dim; ++k) {
      if (!parse_float(fields[k + 1], v[k])) {
        throw FormatError("bad number '" + fields[k + 1] + "'", line_no);
      }
    }
    if (rows == count) throw FormatError("more rows than the header declares", line_no);
    try {
      table.add(fields[0], v);
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
    ++rows;
  }
  if (rows != count) {
    throw FormatError("header declares " + std::to_string(count) + " rows, found " +
                          std::to_string(rows) + " (end of file)",
                      line_no);
  }
  return table;
}

EmbeddingTable read_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    const auto v = table.vector(static_cast<int>(i));
    for (int k = 0; k < table.dim(); ++k) {
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(v[k]));
      out << buf;
    }
    out << '\n';
  }
}

void write_embeddings_file(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_embeddings(out, table);
}

}  // namespace kgnmt::fusion
