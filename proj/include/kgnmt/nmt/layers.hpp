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

#ifndef KGNMT_NMT_LAYERS_HPP_
#define KGNMT_NMT_LAYERS_HPP_

#include <deque>
#include <random>
#include <string>
#include <vector>

#include "kgnmt/nmt/graph.hpp"

namespace kgnmt::nmt {

// Owns parameters at stable addresses, in creation order.
template <typename S>
class ParameterStore {
 public:
  Parameter<S>& make(std::string name, Eigen::Index rows, Eigen::Index cols);
  std::vector<Parameter<S>*> all();
  std::vector<const Parameter<S>*> all() const;
  Parameter<S>* find(const std::string& name);
  std::size_t scalar_count() const;

 private:
  std::deque<Parameter<S>> params_;
};

template <typename S>
struct Linear {
  Parameter<S>* W = nullptr;  // out x in
  Parameter<S>* b = nullptr;  // out x 1, optional
};

template <typename S>
Linear<S> make_linear(ParameterStore<S>& store, const std::string& name, int out, int in,
                      bool bias = true);
template <typename S>
Var<S> apply(Graph<S>& g, const Linear<S>& l, Var<S> x);

// Gates in row blocks i, f, g, o:
//   c' = sigmoid(f) * c + sigmoid(i) * tanh(g),  h' = sigmoid(o) * tanh(c')
// with pre-activations W x + U h + b.
template <typename S>
struct LstmCell {
  Parameter<S>* W = nullptr;  // 4n x in
  Parameter<S>* U = nullptr;  // 4n x n
  Parameter<S>* b = nullptr;  // 4n x 1
  int hidden = 0;
};

template <typename S>
struct LstmState {
  Var<S> h;
  Var<S> c;
};

template <typename S>
LstmCell<S> make_lstm(ParameterStore<S>& store, const std::string& name, int hidden, int input);
template <typename S>
LstmState<S> lstm_step(Graph<S>& g, const LstmCell<S>& cell, Var<S> x, LstmState<S> prev);

// score_j = v . tanh(Wq q + Wk k_j), weights = softmax_j(score),
// context = sum_j weights_j values_j.
template <typename S>
struct AdditiveAttention {
  Parameter<S>* Wq = nullptr;  // a x query
  Parameter<S>* Wk = nullptr;  // a x key
  Parameter<S>* v = nullptr;   // 1 x a
};

template <typename S>
struct AttentionResult {
  Var<S> context;  // value dim x B
  Var<S> weights;  // positions x B
};

template <typename S>
AdditiveAttention<S> make_additive_attention(ParameterStore<S>& store, const std::string& name,
                                             int attn, int query, int key);
// Wk k_j for every key; computed once per source sentence.
template <typename S>
std::vector<Var<S>> project_keys(Graph<S>& g, const AdditiveAttention<S>& att,
                                 const std::vector<Var<S>>& keys);
// `keys` are the projected keys (each a x 1 or a x B); values are value
// dim x B.
template <typename S>
AttentionResult<S> additive_attention(Graph<S>& g, const AdditiveAttention<S>& att, Var<S> query,
                                      const std::vector<Var<S>>& keys,
                                      const std::vector<Var<S>>& values);

template <typename S>
struct LayerNormParams {
  Parameter<S>* gamma = nullptr;
  Parameter<S>* beta = nullptr;
};

template <typename S>
LayerNormParams<S> make_layer_norm(ParameterStore<S>& store, const std::string& name, int dim);
template <typename S>
Var<S> apply(Graph<S>& g, const LayerNormParams<S>& ln, Var<S> x);

template <typename S>
struct FeedForward {
  Linear<S> in;
  Linear<S> out;
};

template <typename S>
FeedForward<S> make_feed_forward(ParameterStore<S>& store, const std::string& name, int dim,
                                 int inner);
template <typename S>
Var<S> apply(Graph<S>& g, const FeedForward<S>& ff, Var<S> x);

template <typename S>
struct MultiHeadAttention {
  Linear<S> q, k, v, o;
  int heads = 1;
};

template <typename S>
MultiHeadAttention<S> make_multi_head_attention(ParameterStore<S>& store, const std::string& name,
                                                int dim, int heads);
// queries: d x Lq, memory: d x Lk. With `causal`, query i attends to keys
// 0..i only. `weights`, if given, receives the head-averaged Lk x Lq
// attention.
template <typename S>
Var<S> multi_head_attention(Graph<S>& g, const MultiHeadAttention<S>& mha, Var<S> queries,
                            Var<S> memory, bool causal, Mat<S>* weights = nullptr);

// pe(2i, p) = sin(p / 10000^(2i/d)), pe(2i+1, p) = cos(p / 10000^(2i/d)).
template <typename S>
Mat<S> sinusoidal_positions(int dim, int length);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_LAYERS_HPP_
