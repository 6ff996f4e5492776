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

#ifndef KGNMT_FUSION_FUSE_HPP_
#define KGNMT_FUSION_FUSE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "kgnmt/fusion/embedding_table.hpp"
#include "kgnmt/kge/model.hpp"
#include "kgnmt/tok/vocab.hpp"

namespace kgnmt::fusion {

enum class FusionMode { concat, init };

// Where a row's (KGE part of the) values came from.
enum class RowSource : std::uint8_t {
  kge_exact,    // dictionary vector of the token or its URI part
  kge_subword,  // composed from subword buckets
  zero,         // zero-filled (concat fallback, PAD in init mode)
  random,       // uniform[-0.1, 0.1]
};

struct Coverage {
  std::size_t covered = 0;
  std::size_t zero_filled = 0;
  std::size_t random_init = 0;
};

// Vocabulary-aligned embedding matrix, one column per vocabulary id.
struct FusedEmbeddingMatrix {
  FusionMode mode = FusionMode::init;
  Eigen::MatrixXf matrix;  // dim x |vocab|
  int base_dim = 0;        // m
  int kge_dim = 0;         // d (concat) or m (init)
  std::vector<RowSource> sources;
  Coverage coverage;

  int dim() const { return static_cast<int>(matrix.rows()); }
  std::size_t rows() const { return static_cast<std::size_t>(matrix.cols()); }
};

// Uniform[-0.1, 0.1] vectors for every vocabulary token, PAD zero.
EmbeddingTable random_embeddings(const tok::Vocabulary& vocab, int dim, std::mt19937_64& rng);

// row(token) = [E(token) ; E'(key)] where key is the token's URI part for
// annotated tokens and the token itself otherwise; [E(token) ; 0] when the
// key does not resolve. Throws if `nmt_emb` lacks a vocabulary token.
FusedEmbeddingMatrix fuse_concat(const EmbeddingTable& nmt_emb, const kge::KgEmbedding& kge,
                                 const tok::Vocabulary& vocab);

// row(token) = E'(token) when the token resolves (exact, then lowercased,
// then subword composition for semantic embeddings); PAD = 0; all other
// rows uniform[-0.1, 0.1]. Throws if kge.dim() != m.
FusedEmbeddingMatrix fuse_init(const kge::KgEmbedding& kge, const tok::Vocabulary& vocab, int m,
                               std::mt19937_64& rng);

// covered / zero_filled / random_init, one "key value" per line.
void write_coverage(std::ostream& out, const Coverage& c);

// The fused matrix as a word2vec table keyed by vocabulary tokens.
EmbeddingTable to_table(const FusedEmbeddingMatrix& fused, const tok::Vocabulary& vocab);

}  // namespace kgnmt::fusion

#endif  // KGNMT_FUSION_FUSE_HPP_
