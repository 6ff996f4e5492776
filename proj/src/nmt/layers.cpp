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

#include "kgnmt/nmt/layers.hpp"

#include <cmath>
#include <limits>

#include "kgnmt/common/error.hpp"

namespace kgnmt::nmt {

template <typename S>
Parameter<S>& ParameterStore<S>::make(std::string name, Eigen::Index rows, Eigen::Index cols) {
  for (const auto& p : params_) {
    if (p.name == name) throw Error("duplicate parameter name '" + name + "'");
  }
  params_.emplace_back(std::move(name), rows, cols);
  return params_.back();
}

template <typename S>
std::vector<Parameter<S>*> ParameterStore<S>::all() {
  std::vector<Parameter<S>*> out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

template <typename S>
std::vector<const Parameter<S>*> ParameterStore<S>::all() const {
  std::vector<const Parameter<S>*> out;
  for (const auto& p : params_) out.push_back(&p);
  return out;
}

template <typename S>
Parameter<S>* ParameterStore<S>::find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename S>
std::size_t ParameterStore<S>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

template <typename S>
Linear<S> make_linear(ParameterStore<S>& store, const std::string& name, int out, int in,
                      bool bias) {
  Linear<S> l;
  l.W = &store.make(name + ".W", out, in);
  if (bias) l.b = &store.make(name + ".b", out, 1);
  return l;
}

template <typename S>
Var<S> apply(Graph<S>& g, const Linear<S>& l, Var<S> x) {
  Var<S> y = matmul(g.param(*l.W), x);
  return l.b ? add(y, g.param(*l.b)) : y;
}

template <typename S>
LstmCell<S> make_lstm(ParameterStore<S>& store, const std::string& name, int hidden, int input) {
  LstmCell<S> c;
  c.W = &store.make(name + ".W", 4 * hidden, input);
  c.U = &store.make(name + ".U", 4 * hidden, hidden);
  c.b = &store.make(name + ".b", 4 * hidden, 1);
  c.hidden = hidden;
  return c;
}

template <typename S>
LstmState<S> lstm_step(Graph<S>& g, const LstmCell<S>& cell, Var<S> x, LstmState<S> prev) {
  const int n = cell.hidden;
  Var<S> z = add(add(matmul(g.param(*cell.W), x), matmul(g.param(*cell.U), prev.h)),
                 g.param(*cell.b));
  Var<S> i = sigmoid(slice_rows(z, 0, n));
  Var<S> f = sigmoid(slice_rows(z, n, n));
  Var<S> u = tanh(slice_rows(z, 2 * n, n));
  Var<S> o = sigmoid(slice_rows(z, 3 * n, n));
  Var<S> c = add(cwise_mul(f, prev.c), cwise_mul(i, u));
  Var<S> h = cwise_mul(o, tanh(c));
  return {h, c};
}

template <typename S>
AdditiveAttention<S> make_additive_attention(ParameterStore<S>& store, const std::string& name,
                                             int attn, int query, int key) {
  AdditiveAttention<S> a;
  a.Wq = &store.make(name + ".Wq", attn, query);
  a.Wk = &store.make(name + ".Wk", attn, key);
  a.v = &store.make(name + ".v", 1, attn);
  return a;
}

template <typename S>
std::vector<Var<S>> project_keys(Graph<S>& g, const AdditiveAttention<S>& att,
                                 const std::vector<Var<S>>& keys) {
  std::vector<Var<S>> out;
  out.reserve(keys.size());
  Var<S> wk = g.param(*att.Wk);
  for (const auto& k : keys) out.push_back(matmul(wk, k));
  return out;
}

template <typename S>
AttentionResult<S> additive_attention(Graph<S>& g, const AdditiveAttention<S>& att, Var<S> query,
                                      const std::vector<Var<S>>& keys,
                                      const std::vector<Var<S>>& values) {
  if (keys.empty() || keys.size() != values.size()) {
    throw Error("additive_attention: need one value per key and at least one key");
  }
  Var<S> q = matmul(g.param(*att.Wq), query);
  Var<S> v = g.param(*att.v);
  std::vector<Var<S>> scores;
  scores.reserve(keys.size());
  for (const auto& k : keys) scores.push_back(matmul(v, tanh(add(q, k))));
  Var<S> weights = softmax_cols(concat_rows(scores));
  std::vector<Var<S>> parts;
  parts.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    parts.push_back(scale_cols(values[j], slice_rows(weights, static_cast<Eigen::Index>(j), 1)));
  }
  return {add_n(parts), weights};
}

template <typename S>
LayerNormParams<S> make_layer_norm(ParameterStore<S>& store, const std::string& name, int dim) {
  LayerNormParams<S> ln;
  ln.gamma = &store.make(name + ".gamma", dim, 1);
  ln.beta = &store.make(name + ".beta", dim, 1);
  ln.gamma->value.setOnes();
  return ln;
}

template <typename S>
Var<S> apply(Graph<S>& g, const LayerNormParams<S>& ln, Var<S> x) {
  return layer_norm(x, g.param(*ln.gamma), g.param(*ln.beta));
}

template <typename S>
FeedForward<S> make_feed_forward(ParameterStore<S>& store, const std::string& name, int dim,
                                 int inner) {
  return {make_linear(store, name + ".in", inner, dim), make_linear(store, name + ".out", dim, inner)};
}

template <typename S>
Var<S> apply(Graph<S>& g, const FeedForward<S>& ff, Var<S> x) {
  return apply(g, ff.out, relu(apply(g, ff.in, x)));
}

template <typename S>
MultiHeadAttention<S> make_multi_head_attention(ParameterStore<S>& store, const std::string& name,
                                                int dim, int heads) {
  if (heads <= 0 || dim % heads != 0) {
    throw ConfigError("model dimension " + std::to_string(dim) +
                      " is not divisible by head count " + std::to_string(heads));
  }
  MultiHeadAttention<S> m;
  m.q = make_linear(store, name + ".q", dim, dim);
  m.k = make_linear(store, name + ".k", dim, dim);
  m.v = make_linear(store, name + ".v", dim, dim);
  m.o = make_linear(store, name + ".o", dim, dim);
  m.heads = heads;
  return m;
}

template <typename S>
Var<S> multi_head_attention(Graph<S>& g, const MultiHeadAttention<S>& mha, Var<S> queries,
                            Var<S> memory, bool causal, Mat<S>* weights) {
  const Eigen::Index d = queries.rows();
  const Eigen::Index lq = queries.cols();
  const Eigen::Index lk = memory.cols();
  const Eigen::Index dh = d / mha.heads;
  Var<S> Q = apply(g, mha.q, queries);
  Var<S> K = apply(g, mha.k, memory);
  Var<S> V = apply(g, mha.v, memory);
  Var<S> mask;
  if (causal) {
    Mat<S> m = Mat<S>::Zero(lk, lq);
    for (Eigen::Index i = 0; i < lq; ++i) {
      for (Eigen::Index j = i + 1; j < lk; ++j) m(j, i) = -std::numeric_limits<S>::infinity();
    }
    mask = g.constant(std::move(m));
  }
  const S s = S(1) / std::sqrt(static_cast<S>(dh));
  if (weights) weights->setZero(lk, lq);
  std::vector<Var<S>> heads;
  for (int h = 0; h < mha.heads; ++h) {
    Var<S> qh = slice_rows(Q, h * dh, dh);
    Var<S> kh = slice_rows(K, h * dh, dh);
    Var<S> vh = slice_rows(V, h * dh, dh);
    Var<S> scores = scale(matmul_tn(kh, qh), s);  // lk x lq
    if (causal) scores = add(scores, mask);
    Var<S> a = softmax_cols(scores);
    if (weights) *weights += a.value() / static_cast<S>(mha.heads);
    heads.push_back(matmul(vh, a));
  }
  return apply(g, mha.o, concat_rows(heads));
}

template <typename S>
Mat<S> sinusoidal_positions(int dim, int length) {
  Mat<S> pe(dim, length);
  for (int p = 0; p < length; ++p) {
    for (int i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, static_cast<double>(2 * (i / 2)) / dim);
      const double angle = p / rate;
      pe(i, p) = static_cast<S>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

#define KGNMT_INSTANTIATE(S)                                                                    \
  template class ParameterStore<S>;                                                             \
  template Linear<S> make_linear(ParameterStore<S>&, const std::string&, int, int, bool);       \
  template Var<S> apply(Graph<S>&, const Linear<S>&, Var<S>);                                   \
  template LstmCell<S> make_lstm(ParameterStore<S>&, const std::string&, int, int);             \
  template LstmState<S> lstm_step(Graph<S>&, const LstmCell<S>&, Var<S>, LstmState<S>);         \
  template AdditiveAttention<S> make_additive_attention(ParameterStore<S>&, const std::string&, \
                                                        int, int, int);                         \
  template std::vector<Var<S>> project_keys(Graph<S>&, const AdditiveAttention<S>&,             \
                                            const std::vector<Var<S>>&);                        \
  template AttentionResult<S> additive_attention(Graph<S>&, const AdditiveAttention<S>&,        \
                                                 Var<S>, const std::vector<Var<S>>&,            \
                                                 const std::vector<Var<S>>&);                   \
  template LayerNormParams<S> make_layer_norm(ParameterStore<S>&, const std::string&, int);     \
  template Var<S> apply(Graph<S>&, const LayerNormParams<S>&, Var<S>);                          \
  template FeedForward<S> make_feed_forward(ParameterStore<S>&, const std::string&, int, int);  \
  template Var<S> apply(Graph<S>&, const FeedForward<S>&, Var<S>);                              \
  template MultiHeadAttention<S> make_multi_head_attention(ParameterStore<S>&,                  \
                                                           const std::string&, int, int);       \
  template Var<S> multi_head_attention(Graph<S>&, const MultiHeadAttention<S>&, Var<S>, Var<S>, \
                                       bool, Mat<S>*);                                          \
  template Mat<S> sinusoidal_positions<S>(int, int);

KGNMT_INSTANTIATE(float)
KGNMT_INSTANTIATE(double)

#undef KGNMT_INSTANTIATE

}  // namespace kgnmt::nmt
