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

#include "kgnmt/nmt/model.hpp"

#include <cmath>
#include <limits>

#include "kgnmt/common/error.hpp"
#include "kgnmt/tok/vocab.hpp"

namespace kgnmt::nmt {

namespace {

constexpr int kPad = tok::Vocabulary::kPad;
constexpr int kBos = tok::Vocabulary::kBos;
constexpr int kEos = tok::Vocabulary::kEos;

template <typename S>
Mat<S> log_softmax(const Mat<S>& x) {
  Mat<S> y(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const S mx = x.col(j).maxCoeff();
    const S lse = mx + std::log((x.col(j).array() - mx).exp().sum());
    y.col(j) = x.col(j).array() - lse;
  }
  return y;
}

// PAD and BOS are never generated; they are removed before normalizing so
// each column stays a distribution.
template <typename S>
Mat<S> decode_log_probs(Mat<S> logits) {
  logits.row(kPad).setConstant(-std::numeric_limits<S>::infinity());
  logits.row(kBos).setConstant(-std::numeric_limits<S>::infinity());
  return log_softmax(logits);
}

template <typename S>
Mat<S> select_cols(const Mat<S>& m, const std::vector<int>& parents) {
  Mat<S> out(m.rows(), static_cast<Eigen::Index>(parents.size()));
  for (std::size_t k = 0; k < parents.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = m.col(parents[k]);
  }
  return out;
}

}  // namespace

template <typename S>
Seq2Seq<S>::Seq2Seq(const ModelConfig& config, int src_vocab, int tgt_vocab)
    : config_(config), src_vocab_(src_vocab), tgt_vocab_(tgt_vocab) {
  config_.validate();
  if (src_vocab <= kEos || tgt_vocab <= kEos) {
    throw ConfigError("vocabularies must contain the reserved tokens");
  }
  src_emb_ = &store_.make("src_embedding", config.emb_dim, src_vocab);
  tgt_emb_ = &store_.make("tgt_embedding", config.emb_dim, tgt_vocab);
}

template <typename S>
void Seq2Seq<S>::initialize(std::mt19937_64& rng) {
  for (Parameter<S>* p : store_.all()) {
    const auto& n = p->name;
    if (n.ends_with(".gamma")) {
      p->value.setOnes();
    } else if (n.ends_with(".beta") || n == "out.vocab_bias") {
      p->value.setZero();
    } else {
      init_uniform(*p, S(0.1), rng);
    }
  }
  src_emb_->value.col(kPad).setZero();
  tgt_emb_->value.col(kPad).setZero();
}

// RNN ------------------------------------------------------------------

template <typename S>
RnnModel<S>::RnnModel(const ModelConfig& config, int src_vocab, int tgt_vocab)
    : Seq2Seq<S>(config, src_vocab, tgt_vocab) {
  auto& st = this->store_;
  const int n = config.hidden;
  const int e = config.emb_dim;
  for (int l = 0; l < config.layers; ++l) {
    const int in = l == 0 ? e : 2 * n;
    enc_fwd_.push_back(make_lstm(st, "enc.l" + std::to_string(l) + ".fwd", n, in));
    enc_bwd_.push_back(make_lstm(st, "enc.l" + std::to_string(l) + ".bwd", n, in));
  }
  for (int l = 0; l < config.layers; ++l) {
    dec_.push_back(make_lstm(st, "dec.l" + std::to_string(l), 2 * n, l == 0 ? e : 2 * n));
  }
  attention_ = make_additive_attention(st, "attn", n, 2 * n, 2 * n);
  out_ = make_linear(st, "out", e, 4 * n);
  if (config.tie_output) {
    out_bias_ = &st.make("out.vocab_bias", tgt_vocab, 1);
  } else {
    project_ = make_linear(st, "out.vocab", tgt_vocab, e);
  }
}

template <typename S>
typename RnnModel<S>::Encoded RnnModel<S>::encode(Graph<S>& g,
                                                  const std::vector<std::vector<int>>& src,
                                                  bool train, S dropout, std::mt19937_64& rng) {
  if (src.empty() || src.front().empty()) throw Error("rnn encoder: empty source sequence");
  const std::size_t L = src.front().size();
  for (const auto& s : src) {
    if (s.size() != L) throw Error("rnn encoder: batch sources differ in length");
  }
  const auto B = static_cast<Eigen::Index>(src.size());
  const int n = this->config_.hidden;
  const int layers = this->config_.layers;
  const S p = train ? dropout : S(0);

  std::vector<Var<S>> inputs(L);
  for (std::size_t t = 0; t < L; ++t) {
    std::vector<int> ids(src.size());
    for (std::size_t b = 0; b < src.size(); ++b) ids[b] = src[b][t];
    inputs[t] = nmt::dropout(lookup(g, *this->src_emb_, ids), p, rng);
  }
  Encoded enc;
  enc.fwd.resize(static_cast<std::size_t>(layers));
  enc.bwd.resize(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    std::vector<Var<S>> in(L);
    for (std::size_t t = 0; t < L; ++t) {
      in[t] = l == 0 ? inputs[t]
                     : nmt::dropout(concat_rows<S>({enc.fwd[lu - 1][t], enc.bwd[lu - 1][t]}), p,
                                    rng);
    }
    for (int dir = 0; dir < 2; ++dir) {
      const LstmCell<S>& cell = dir == 0 ? enc_fwd_[lu] : enc_bwd_[lu];
      auto& out = dir == 0 ? enc.fwd[lu] : enc.bwd[lu];
      out.resize(L);
      LstmState<S> st{g.constant(Mat<S>::Zero(n, B)), g.constant(Mat<S>::Zero(n, B))};
      for (std::size_t k = 0; k < L; ++k) {
        const std::size_t t = dir == 0 ? k : L - 1 - k;
        LstmState<S> next = lstm_step(g, cell, in[t], st);
        if (l > 0) {
          const auto& below = dir == 0 ? enc.fwd[lu - 1][t] : enc.bwd[lu - 1][t];
          next.h = add(below, next.h);
        }
        out[t] = next.h;
        st = next;
      }
    }
  }
  enc.top.resize(L);
  for (std::size_t t = 0; t < L; ++t) {
    enc.top[t] = concat_rows<S>({enc.fwd.back()[t], enc.bwd.back()[t]});
  }
  return enc;
}

template <typename S>
typename RnnModel<S>::DecoderState RnnModel<S>::initial_state(Graph<S>& g,
                                                              const std::vector<Var<S>>& top) {
  Var<S> mean = scale(add_n(top), S(1) / static_cast<S>(top.size()));
  DecoderState st;
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    st.layers.push_back({mean, g.constant(Mat<S>::Zero(mean.rows(), mean.cols()))});
  }
  return st;
}

template <typename S>
Var<S> RnnModel<S>::logits(Graph<S>& g, Var<S> o) {
  if (this->config_.tie_output) {
    return add(matmul_tn(g.param(*this->tgt_emb_), o), g.param(*out_bias_));
  }
  return apply(g, project_, o);
}

template <typename S>
std::pair<Var<S>, Var<S>> RnnModel<S>::decode_step(Graph<S>& g, DecoderState& state,
                                                   const std::vector<int>& prev,
                                                   const std::vector<Var<S>>& keys,
                                                   const std::vector<Var<S>>& values, bool train,
                                                   S dropout, std::mt19937_64& rng) {
  const S p = train ? dropout : S(0);
  Var<S> x = nmt::dropout(lookup(g, *this->tgt_emb_, prev), p, rng);
  Var<S> h;
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    if (l == 0) {
      state.layers[0] = lstm_step(g, dec_[0], x, state.layers[0]);
      h = state.layers[0].h;
    } else {
      LstmState<S> next = lstm_step(g, dec_[l], nmt::dropout(h, p, rng), state.layers[l]);
      next.h = add(h, next.h);
      state.layers[l] = next;
      h = next.h;
    }
  }
  AttentionResult<S> att = additive_attention(g, attention_, h, keys, values);
  Var<S> o = tanh(apply(g, out_, concat_rows<S>({h, att.context})));
  o = nmt::dropout(o, p, rng);
  return {logits(g, o), att.weights};
}

template <typename S>
Var<S> RnnModel<S>::loss(Graph<S>& g, std::span<const Example* const> batch, bool train,
                         S dropout, std::mt19937_64& rng, int* tokens) {
  if (batch.empty()) throw Error("rnn loss: empty batch");
  std::vector<std::vector<int>> src;
  std::size_t T = 0;
  int count = 0;
  for (const Example* ex : batch) {
    src.push_back(ex->src);
    T = std::max(T, ex->tgt.size() + 1);
    count += static_cast<int>(ex->tgt.size()) + 1;
  }
  Encoded enc = encode(g, src, train, dropout, rng);
  std::vector<Var<S>> keys = project_keys(g, attention_, enc.top);
  DecoderState state = initial_state(g, enc.top);
  std::vector<Var<S>> losses;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<int> prev(batch.size());
    std::vector<int> target(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto& y = batch[b]->tgt;
      prev[b] = t == 0 ? kBos : (t - 1 < y.size() ? y[t - 1] : kPad);
      target[b] = t < y.size() ? y[t] : (t == y.size() ? kEos : -1);
    }
    auto [lg, w] = decode_step(g, state, prev, keys, enc.top, train, dropout, rng);
    (void)w;
    losses.push_back(cross_entropy(lg, target, -1));
  }
  if (tokens) *tokens = count;
  return add_n(losses);
}

namespace {

template <typename S>
class RnnSession : public DecodeSession<S> {
 public:
  RnnSession(RnnModel<S>& model, const std::vector<int>& src) : model_(model) {
    Graph<S> g;
    std::mt19937_64 rng(0);
    auto enc = model.encode(g, {src}, false, S(0), rng);
    auto keys = project_keys(g, model.attention(), enc.top);
    for (std::size_t t = 0; t < enc.top.size(); ++t) {
      values_.push_back(enc.top[t].value());
      keys_.push_back(keys[t].value());
    }
    auto st = model.initial_state(g, enc.top);
    for (const auto& l : st.layers) {
      h_.push_back(l.h.value());
      c_.push_back(l.c.value());
    }
  }

  StepOutput<S> step(const std::vector<int>& prev) override {
    const auto K = static_cast<Eigen::Index>(prev.size());
    if (K != h_.front().cols()) throw Error("decode step: hypothesis count mismatch");
    Graph<S> g;
    std::mt19937_64 rng(0);
    std::vector<Var<S>> keys;
    std::vector<Var<S>> values;
    for (std::size_t t = 0; t < values_.size(); ++t) {
      keys.push_back(g.constant(keys_[t]));
      values.push_back(g.constant(values_[t].replicate(1, K)));
    }
    typename RnnModel<S>::DecoderState st;
    for (std::size_t l = 0; l < h_.size(); ++l) {
      st.layers.push_back({g.constant(h_[l]), g.constant(c_[l])});
    }
    auto [lg, w] = model_.decode_step(g, st, prev, keys, values, false, S(0), rng);
    for (std::size_t l = 0; l < h_.size(); ++l) {
      h_[l] = st.layers[l].h.value();
      c_[l] = st.layers[l].c.value();
    }
    StepOutput<S> out{decode_log_probs<S>(lg.value()), w.value()};
    return out;
  }

  void select(const std::vector<int>& parents) override {
    for (auto& h : h_) h = select_cols(h, parents);
    for (auto& c : c_) c = select_cols(c, parents);
  }

  int source_length() const override { return static_cast<int>(values_.size()); }

 private:
  RnnModel<S>& model_;
  std::vector<Mat<S>> keys_;
  std::vector<Mat<S>> values_;
  std::vector<Mat<S>> h_;
  std::vector<Mat<S>> c_;
};

}  // namespace

template <typename S>
std::unique_ptr<DecodeSession<S>> RnnModel<S>::start(const std::vector<int>& src) {
  return std::make_unique<RnnSession<S>>(*this, src);
}

template <typename S>
RnnEncoderStates<S> RnnModel<S>::encoder_states(const std::vector<int>& src) {
  Graph<S> g;
  std::mt19937_64 rng(0);
  Encoded enc = encode(g, {src}, false, S(0), rng);
  RnnEncoderStates<S> out;
  for (std::size_t l = 0; l < enc.fwd.size(); ++l) {
    Mat<S> f(this->config_.hidden, static_cast<Eigen::Index>(src.size()));
    Mat<S> b(this->config_.hidden, static_cast<Eigen::Index>(src.size()));
    for (std::size_t t = 0; t < src.size(); ++t) {
      f.col(static_cast<Eigen::Index>(t)) = enc.fwd[l][t].value().col(0);
      b.col(static_cast<Eigen::Index>(t)) = enc.bwd[l][t].value().col(0);
    }
    out.forward.push_back(std::move(f));
    out.backward.push_back(std::move(b));
  }
  return out;
}

// Transformer ------------------------------------------------------------

template <typename S>
TransformerModel<S>::TransformerModel(const ModelConfig& config, int src_vocab, int tgt_vocab)
    : Seq2Seq<S>(config, src_vocab, tgt_vocab) {
  auto& st = this->store_;
  const int d = config.hidden;
  const int e = config.emb_dim;
  enc_in_ = make_linear(st, "enc.in", d, e, false);
  dec_in_ = make_linear(st, "dec.in", d, e, false);
  for (int l = 0; l < config.layers; ++l) {
    const std::string p = "enc.l" + std::to_string(l);
    EncoderLayer layer;
    layer.ln1 = make_layer_norm(st, p + ".ln1", d);
    layer.self = make_multi_head_attention(st, p + ".self", d, config.heads);
    layer.ln2 = make_layer_norm(st, p + ".ln2", d);
    layer.ff = make_feed_forward(st, p + ".ff", d, config.ffn);
    enc_.push_back(layer);
  }
  for (int l = 0; l < config.layers; ++l) {
    const std::string p = "dec.l" + std::to_string(l);
    DecoderLayer layer;
    layer.ln1 = make_layer_norm(st, p + ".ln1", d);
    layer.self = make_multi_head_attention(st, p + ".self", d, config.heads);
    layer.ln2 = make_layer_norm(st, p + ".ln2", d);
    layer.cross = make_multi_head_attention(st, p + ".cross", d, config.heads);
    layer.ln3 = make_layer_norm(st, p + ".ln3", d);
    layer.ff = make_feed_forward(st, p + ".ff", d, config.ffn);
    dec_.push_back(layer);
  }
  enc_norm_ = make_layer_norm(st, "enc.norm", d);
  dec_norm_ = make_layer_norm(st, "dec.norm", d);
  if (config.tie_output) {
    out_ = make_linear(st, "out", e, d, false);
  } else {
    out_ = make_linear(st, "out.vocab", tgt_vocab, d, false);
  }
  out_bias_ = &st.make("out.vocab_bias", tgt_vocab, 1);
}

template <typename S>
Var<S> TransformerModel<S>::embed(Graph<S>& g, Parameter<S>& table, const Linear<S>& proj,
                                  const std::vector<int>& ids, bool train, S dropout,
                                  std::mt19937_64& rng) {
  const int d = this->config_.hidden;
  Var<S> x = apply(g, proj, lookup(g, table, ids));
  x = add(x, g.constant(sinusoidal_positions<S>(d, static_cast<int>(ids.size()))));
  return nmt::dropout(x, train ? dropout : S(0), rng);
}

template <typename S>
Var<S> TransformerModel<S>::encode(Graph<S>& g, const std::vector<int>& src, bool train,
                                   S dropout, std::mt19937_64& rng, std::vector<Var<S>>* states) {
  if (src.empty()) throw Error("transformer encoder: empty source sequence");
  const S p = train ? dropout : S(0);
  Var<S> x = embed(g, *this->src_emb_, enc_in_, src, train, dropout, rng);
  if (states) states->push_back(x);
  for (const auto& layer : enc_) {
    Var<S> a = apply(g, layer.ln1, x);
    x = add(x, nmt::dropout(multi_head_attention(g, layer.self, a, a, false), p, rng));
    x = add(x, nmt::dropout(apply(g, layer.ff, apply(g, layer.ln2, x)), p, rng));
    if (states) states->push_back(x);
  }
  return apply(g, enc_norm_, x);
}

template <typename S>
Var<S> TransformerModel<S>::decode(Graph<S>& g, Var<S> memory, const std::vector<int>& inputs,
                                   bool train, S dropout, std::mt19937_64& rng,
                                   Mat<S>* attention) {
  const S p = train ? dropout : S(0);
  Var<S> y = embed(g, *this->tgt_emb_, dec_in_, inputs, train, dropout, rng);
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    const auto& layer = dec_[l];
    Var<S> a = apply(g, layer.ln1, y);
    y = add(y, nmt::dropout(multi_head_attention(g, layer.self, a, a, true), p, rng));
    Mat<S>* w = l + 1 == dec_.size() ? attention : nullptr;
    y = add(y, nmt::dropout(
                   multi_head_attention(g, layer.cross, apply(g, layer.ln2, y), memory, false, w),
                   p, rng));
    y = add(y, nmt::dropout(apply(g, layer.ff, apply(g, layer.ln3, y)), p, rng));
  }
  Var<S> out = apply(g, out_, apply(g, dec_norm_, y));
  if (this->config_.tie_output) out = matmul_tn(g.param(*this->tgt_emb_), out);
  return add(out, g.param(*out_bias_));
}

template <typename S>
Var<S> TransformerModel<S>::loss(Graph<S>& g, std::span<const Example* const> batch, bool train,
                                 S dropout, std::mt19937_64& rng, int* tokens) {
  if (batch.empty()) throw Error("transformer loss: empty batch");
  std::vector<Var<S>> losses;
  int count = 0;
  for (const Example* ex : batch) {
    Var<S> memory = encode(g, ex->src, train, dropout, rng);
    std::vector<int> inputs{kBos};
    inputs.insert(inputs.end(), ex->tgt.begin(), ex->tgt.end());
    std::vector<int> targets(ex->tgt.begin(), ex->tgt.end());
    targets.push_back(kEos);
    losses.push_back(cross_entropy(decode(g, memory, inputs, train, dropout, rng), targets));
    count += static_cast<int>(targets.size());
  }
  if (tokens) *tokens = count;
  return add_n(losses);
}

template <typename S>
std::vector<Mat<S>> TransformerModel<S>::encoder_states(const std::vector<int>& src) {
  Graph<S> g;
  std::mt19937_64 rng(0);
  std::vector<Var<S>> states;
  encode(g, src, false, S(0), rng, &states);
  std::vector<Mat<S>> out;
  for (const auto& s : states) out.push_back(s.value());
  return out;
}

template <typename S>
Mat<S> TransformerModel<S>::decoder_log_probs(const std::vector<int>& src,
                                              const std::vector<int>& prefix) {
  Graph<S> g;
  std::mt19937_64 rng(0);
  Var<S> memory = encode(g, src, false, S(0), rng);
  std::vector<int> inputs{kBos};
  inputs.insert(inputs.end(), prefix.begin(), prefix.end());
  return log_softmax(decode(g, memory, inputs, false, S(0), rng).value());
}

namespace {

template <typename S>
class TransformerSession : public DecodeSession<S> {
 public:
  TransformerSession(TransformerModel<S>& model, const std::vector<int>& src) : model_(model) {
    Graph<S> g;
    std::mt19937_64 rng(0);
    memory_ = model.encode(g, src, false, S(0), rng).value();
    prefixes_.emplace_back();
  }

  StepOutput<S> step(const std::vector<int>& prev) override {
    if (prev.size() != prefixes_.size()) throw Error("decode step: hypothesis count mismatch");
    StepOutput<S> out;
    out.log_probs.resize(model_.tgt_vocab_size(), static_cast<Eigen::Index>(prev.size()));
    out.attention.resize(memory_.cols(), static_cast<Eigen::Index>(prev.size()));
    for (std::size_t k = 0; k < prev.size(); ++k) {
      prefixes_[k].push_back(prev[k]);
      Graph<S> g;
      std::mt19937_64 rng(0);
      Mat<S> att;
      Var<S> lg = model_.decode(g, g.constant(memory_), prefixes_[k], false, S(0), rng, &att);
      const Eigen::Index last = lg.cols() - 1;
      out.log_probs.col(static_cast<Eigen::Index>(k)) = decode_log_probs<S>(lg.value().col(last));
      out.attention.col(static_cast<Eigen::Index>(k)) = att.col(last);
    }
    return out;
  }

  void select(const std::vector<int>& parents) override {
    std::vector<std::vector<int>> next;
    next.reserve(parents.size());
    for (int p : parents) next.push_back(prefixes_[static_cast<std::size_t>(p)]);
    prefixes_ = std::move(next);
  }

  int source_length() const override { return static_cast<int>(memory_.cols()); }

 private:
  TransformerModel<S>& model_;
  Mat<S> memory_;
  std::vector<std::vector<int>> prefixes_;
};

}  // namespace

template <typename S>
std::unique_ptr<DecodeSession<S>> TransformerModel<S>::start(const std::vector<int>& src) {
  return std::make_unique<TransformerSession<S>>(*this, src);
}

template <typename S>
std::unique_ptr<Seq2Seq<S>> make_model(const ModelConfig& config, int src_vocab, int tgt_vocab) {
  if (config.arch == Architecture::rnn) {
    return std::make_unique<RnnModel<S>>(config, src_vocab, tgt_vocab);
  }
  return std::make_unique<TransformerModel<S>>(config, src_vocab, tgt_vocab);
}

template class Seq2Seq<float>;
template class Seq2Seq<double>;
template class RnnModel<float>;
template class RnnModel<double>;
template class TransformerModel<float>;
template class TransformerModel<double>;
template std::unique_ptr<Seq2Seq<float>> make_model(const ModelConfig&, int, int);
template std::unique_ptr<Seq2Seq<double>> make_model(const ModelConfig&, int, int);

}  // namespace kgnmt::nmt
