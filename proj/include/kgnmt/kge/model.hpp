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

#ifndef KGNMT_KGE_MODEL_HPP_
#define KGNMT_KGE_MODEL_HPP_

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgnmt/fusion/embedding_table.hpp"
#include "kgnmt/kb/records.hpp"
#include "kgnmt/kge/huffman.hpp"
#include "kgnmt/kge/objective.hpp"

namespace kgnmt::kge {

using kb::KgeMode;

struct KgeConfig {
  int dim = 500;
  int epochs = 5;
  double lr = 0.05;
  int min_subword = 2;
  int max_subword = 5;
  std::uint32_t bucket_count = 1u << 21;
  int threads = 1;
  std::uint64_t seed = 0;
  KgeMode mode = KgeMode::structure;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;
  bool uses_subwords() const { return mode == KgeMode::semantic; }
};

struct SubwordSpec {
  int min_n = 2;
  int max_n = 5;
  std::uint32_t buckets = 1u << 21;
};

// Trained embeddings E': one vector per dictionary token, plus the subword
// bucket rows needed to compose vectors for unseen tokens (semantic mode).
// Buckets never touched during training are zero.
struct KgEmbedding {
  fusion::EmbeddingTable vectors;
  KgeMode mode = KgeMode::structure;
  std::optional<SubwordSpec> subwords;
  std::map<std::uint32_t, Eigen::VectorXf> buckets;

  int dim() const { return vectors.dim(); }
};

// Dictionary row, else (semantic) mean of the token's n-gram bucket rows,
// else nothing.
std::optional<Eigen::VectorXf> kge_vector(const KgEmbedding& emb, std::string_view token);

// Top-k tokens by cosine similarity to `token`, excluding it; ties broken
// lexicographically. Throws if the token does not resolve or its vector is
// zero.
std::vector<std::pair<std::string, double>> nearest_neighbors(const KgEmbedding& emb,
                                                              std::string_view token, int k);

// Writes `path` in word2vec text format and, for semantic embeddings, the
// bucket rows to `path + ".subwords"`.
void save_embedding(const std::string& path, const KgEmbedding& emb);
KgEmbedding load_embedding(const std::string& path);

class KgeModel {
 public:
  KgeModel(const KgeConfig& config, const kb::KgeRecordSet& records);

  const KgeConfig& config() const { return config_; }
  int dim() const { return config_.dim; }

  const std::vector<std::string>& tokens() const { return tokens_; }
  int token_id(std::string_view token) const;
  const HuffmanTree& tree() const { return tree_; }

  // dim x (tokens + touched buckets); columns are lookup rows of V.
  const Eigen::MatrixXf& input() const { return input_; }
  Eigen::MatrixXf& input() { return input_; }
  // dim x (labels - 1) hierarchical-softmax node vectors.
  const Eigen::MatrixXf& nodes() const { return nodes_; }
  Eigen::MatrixXf& nodes() { return nodes_; }

  // Input columns for a token: its own row plus, in semantic mode, its
  // n-gram bucket rows. Unknown tokens contribute only bucket rows.
  std::vector<int> input_ids(std::string_view token) const;
  std::optional<int> bucket_slot(std::uint32_t bucket) const;

  const std::vector<EncodedRecord>& encoded() const { return encoded_; }
  EncodedRecord encode(const kb::KgeRecord& r) const;

  Eigen::VectorXf hidden(std::span<const std::string> features) const;
  std::vector<float> label_log_probs(const Eigen::VectorXf& hidden) const;

  std::optional<Eigen::VectorXf> vector(std::string_view token) const;
  KgEmbedding embedding() const;

  // Mean training loss of each epoch.
  const std::vector<double>& epoch_loss() const { return epoch_loss_; }
  double loss() const;

  // Number of times a subword bucket row was resolved.
  std::size_t bucket_accesses() const { return bucket_accesses_.n.load(); }

  void train();

 private:
  KgeConfig config_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> token_index_;
  std::unordered_map<std::uint32_t, int> bucket_slots_;
  HuffmanTree tree_;
  Eigen::MatrixXf input_;
  Eigen::MatrixXf nodes_;
  std::vector<EncodedRecord> encoded_;
  std::vector<double> epoch_loss_;
  struct Counter {
    std::atomic<std::size_t> n{0};
    Counter() = default;
    Counter(const Counter& o) : n(o.n.load()) {}
    Counter& operator=(const Counter& o) {
      n = o.n.load();
      return *this;
    }
  };
  mutable Counter bucket_accesses_;
};

// Builds the dictionary and Huffman tree from the records and runs SGD with
// a linearly decaying learning rate. threads == 1 is deterministic.
KgeModel train_kge(const kb::KgeRecordSet& records, const KgeConfig& config);

// Config file keys kge.dim, kge.epochs, kge.lr, kge.minn, kge.maxn,
// kge.buckets, kge.threads, kge.seed, kge.mode.
KgeConfig kge_config_from(const std::map<std::string, std::string>& kv);

}  // namespace kgnmt::kge

#endif  // KGNMT_KGE_MODEL_HPP_
