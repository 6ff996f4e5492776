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

#ifndef KGNMT_FUSION_EMBEDDING_TABLE_HPP_
#define KGNMT_FUSION_EMBEDDING_TABLE_HPP_

#include <Eigen/Dense>

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgnmt::fusion {

// Token -> dense vector, all of one dimension. Vectors are the columns of
// a dim x size matrix.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Throws on duplicate tokens or a dimension mismatch.
  void add(std::string token, const Eigen::Ref<const Eigen::VectorXf>& v);

  // -1 when absent.
  int index(std::string_view token) const;
  bool contains(std::string_view token) const { return index(token) >= 0; }

  Eigen::Map<const Eigen::VectorXf> vector(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }
  Eigen::Map<const Eigen::MatrixXf> matrix() const {
    return {data_.data(), dim_, static_cast<Eigen::Index>(tokens_.size())};
  }

 private:
  int dim_ = 0;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  std::vector<float> data_;
};

// word2vec text format: "count dim" header, then "token f1 ... fdim" rows.
// Throws FormatError (with line number) on header/row count mismatches and
// rows of the wrong width.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable read_embeddings_file(const std::string& path);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
void write_embeddings_file(const std::string& path, const EmbeddingTable& table);

}  // namespace kgnmt::fusion

#endif  // KGNMT_FUSION_EMBEDDING_TABLE_HPP_
