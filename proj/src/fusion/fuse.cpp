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

#include "kgnmt/fusion/fuse.hpp"

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/el/linker.hpp"
#include "kgnmt/tok/bpe.hpp"

namespace kgnmt::fusion {

namespace {

float uniform01(std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-0.1f, 0.1f);
  return dist(rng);
}

void count(Coverage& c, RowSource s) {
  switch (s) {
    case RowSource::kge_exact:
    case RowSource::kge_subword: ++c.covered; break;
    case RowSource::zero: ++c.zero_filled; break;
    case RowSource::random: ++c.random_init; break;
  }
}

bool is_reserved(int id) { return id < 4; }

}  // namespace

EmbeddingTable random_embeddings(const tok::Vocabulary& vocab, int dim, std::mt19937_64& rng) {
  EmbeddingTable table(dim);
  Eigen::VectorXf v(dim);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    for (int k = 0; k < dim; ++k) v[k] = uniform01(rng);
    if (static_cast<int>(i) == tok::Vocabulary::kPad) v.setZero();
    table.add(vocab.token(static_cast<int>(i)), v);
  }
  return table;
}

FusedEmbeddingMatrix fuse_concat(const EmbeddingTable& nmt_emb, const kge::KgEmbedding& kge,
                                 const tok::Vocabulary& vocab) {
  const int m = nmt_emb.dim();
  const int d = kge.dim();
  FusedEmbeddingMatrix out;
  out.mode = FusionMode::concat;
  out.base_dim = m;
  out.kge_dim = d;
  out.matrix.setZero(m + d, static_cast<Eigen::Index>(vocab.size()));
  out.sources.resize(vocab.size(), RowSource::zero);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto& token = vocab.token(static_cast<int>(i));
    const int row = nmt_emb.index(token);
    if (row < 0) throw Error("fuse_concat: no NMT embedding for vocabulary token '" + token + "'");
    out.matrix.col(i).head(m) = nmt_emb.vector(row);

    const std::string key = el::is_annotation_token(token) ? el::annotation_uri(token) : token;
    if (!is_reserved(static_cast<int>(i))) {
      if (const int k = kge.vectors.index(key); k >= 0) {
        out.matrix.col(i).tail(d) = kge.vectors.vector(k);
        out.sources[i] = RowSource::kge_exact;
      } else if (auto v = kge::kge_vector(kge, key); v && !v->isZero(0)) {
        out.matrix.col(i).tail(d) = *v;
        out.sources[i] = RowSource::kge_subword;
      }
    }
    count(out.coverage, out.sources[i]);
  }
  return out;
}

FusedEmbeddingMatrix fuse_init(const kge::KgEmbedding& kge, const tok::Vocabulary& vocab, int m,
                               std::mt19937_64& rng) {
  if (kge.dim() != m) {
    throw Error("fuse_init: KGE dimension " + std::to_string(kge.dim()) +
                " does not match embedding dimension " + std::to_string(m));
  }
  FusedEmbeddingMatrix out;
  out.mode = FusionMode::init;
  out.base_dim = m;
  out.kge_dim = m;
  out.matrix.setZero(m, static_cast<Eigen::Index>(vocab.size()));
  out.sources.resize(vocab.size(), RowSource::random);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const int id = static_cast<int>(i);
    auto col = out.matrix.col(id);
    // Random draws happen for every non-PAD row so that the stream does
    // not depend on coverage.
    Eigen::VectorXf r(m);
    for (int k = 0; k < m; ++k) r[k] = uniform01(rng);
    if (id == tok::Vocabulary::kPad) {
      out.sources[i] = RowSource::zero;
      count(out.coverage, out.sources[i]);
      continue;
    }
    col = r;
    if (!is_reserved(id)) {
      std::string key = vocab.token(id);
      if (key.ends_with(tok::kEndOfWord)) key.resize(key.size() - tok::kEndOfWord.size());
      const std::string lower = lowercase(key);
      if (const int k = kge.vectors.index(key); k >= 0) {
        col = kge.vectors.vector(k);
        out.sources[i] = RowSource::kge_exact;
      } else if (const int kl = kge.vectors.index(lower); kl >= 0) {
        col = kge.vectors.vector(kl);
        out.sources[i] = RowSource::kge_exact;
      } else if (auto v = kge::kge_vector(kge, lower); v && !v->isZero(0)) {
        col = *v;
        out.sources[i] = RowSource::kge_subword;
      }
    }
    count(out.coverage, out.sources[i]);
  }
  return out;
}

void write_coverage(std::ostream& out, const Coverage& c) {
  out << "covered " << c.covered << '\n'
      << "zero_filled " << c.zero_filled << '\n'
      << "random_init " << c.random_init << '\n';
}

EmbeddingTable to_table(const FusedEmbeddingMatrix& fused, const tok::Vocabulary& vocab) {
  EmbeddingTable t(fused.dim());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    t.add(vocab.token(static_cast<int>(i)), fused.matrix.col(static_cast<Eigen::Index>(i)));
  }
  return t;
}

}  // namespace kgnmt::fusion
