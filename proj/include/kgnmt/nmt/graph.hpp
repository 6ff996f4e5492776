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

#ifndef KGNMT_NMT_GRAPH_HPP_
#define KGNMT_NMT_GRAPH_HPP_

#include <Eigen/Dense>

#include <deque>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace kgnmt::nmt {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// A trainable tensor. `mask`, when non-empty, has the shape of `value` and
// zeroes the update of frozen entries.
template <typename S>
struct Parameter {
  std::string name;
  Mat<S> value;
  Mat<S> grad;
  Mat<S> mask;
  Mat<S> m;  // optimizer moments
  Mat<S> v;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat<S>::Zero(rows, cols)) {}

  void zero_grad() {
    if (grad.rows() != value.rows() || grad.cols() != value.cols()) {
      grad.setZero(value.rows(), value.cols());
    } else {
      grad.setZero();
    }
  }
  Eigen::Index size() const { return value.size(); }
};

template <typename S>
void init_uniform(Parameter<S>& p, S scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-static_cast<double>(scale),
                                              static_cast<double>(scale));
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<S>(dist(rng));
}

template <typename S>
class Graph;

// Handle to a node of a Graph.
template <typename S>
struct Var {
  Graph<S>* graph = nullptr;
  int id = -1;

  const Mat<S>& value() const { return graph->value(id); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return graph != nullptr; }
};

// Tape of differentiable operations. Nodes are appended in evaluation
// order; backward() walks them in reverse.
template <typename S>
class Graph {
 public:
  using Backward = std::function<void()>;

  Var<S> constant(Mat<S> value);
  // Differentiable leaf owned by the graph.
  Var<S> input(Mat<S> value);
  // Leaf that reads and accumulates into `p` directly.
  Var<S> param(Parameter<S>& p);

  Var<S> record(Mat<S> value, bool requires_grad, Backward backward = nullptr);
  void set_backward(Var<S> v, Backward backward);

  const Mat<S>& value(int id) const;
  // Gradient of node `id`, zero-allocated on first access.
  Mat<S>& grad(int id);
  bool has_grad(int id) const;
  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

  // Seeds d(loss)/d(loss) = 1 for a 1x1 node and propagates.
  void backward(Var<S> loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat<S> value;
    Mat<S> grad;
    Parameter<S>* param = nullptr;
    bool requires_grad = false;
    bool grad_live = false;
    Backward backward;
  };
  std::deque<Node> nodes_;
};

// Differentiable operations. Column vectors are features; columns of a
// matrix are independent items.

template <typename S> Var<S> matmul(Var<S> a, Var<S> b);
// a^T b
template <typename S> Var<S> matmul_tn(Var<S> a, Var<S> b);
// Same shapes, or b a column broadcast over the columns of a.
template <typename S> Var<S> add(Var<S> a, Var<S> b);
template <typename S> Var<S> add_n(const std::vector<Var<S>>& xs);
template <typename S> Var<S> sub(Var<S> a, Var<S> b);
template <typename S> Var<S> cwise_mul(Var<S> a, Var<S> b);
template <typename S> Var<S> scale(Var<S> a, S s);
// Column j of a multiplied by w(0, j); w is 1 x cols(a).
template <typename S> Var<S> scale_cols(Var<S> a, Var<S> w);
template <typename S> Var<S> sigmoid(Var<S> a);
template <typename S> Var<S> tanh(Var<S> a);
template <typename S> Var<S> relu(Var<S> a);
template <typename S> Var<S> concat_rows(const std::vector<Var<S>>& xs);
template <typename S> Var<S> concat_cols(const std::vector<Var<S>>& xs);
template <typename S> Var<S> slice_rows(Var<S> a, Eigen::Index start, Eigen::Index n);
template <typename S> Var<S> slice_cols(Var<S> a, Eigen::Index start, Eigen::Index n);
// Softmax of every column.
template <typename S> Var<S> softmax_cols(Var<S> a);
template <typename S> Var<S> log_softmax_cols(Var<S> a);
// Per-column normalization with d x 1 gain and bias.
template <typename S> Var<S> layer_norm(Var<S> x, Var<S> gamma, Var<S> beta, S eps = S(1e-5));
// Sum of all entries (1 x 1).
template <typename S> Var<S> sum(Var<S> a);
// Columns `ids` of the parameter (an embedding lookup).
template <typename S> Var<S> lookup(Graph<S>& g, Parameter<S>& table, const std::vector<int>& ids);
// Sum over columns j with targets[j] != ignore of -log softmax(logits)_j.
template <typename S>
Var<S> cross_entropy(Var<S> logits, const std::vector<int>& targets, int ignore = -1);
// Inverted dropout with keep probability 1 - p.
template <typename S> Var<S> dropout(Var<S> x, S p, std::mt19937_64& rng);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_GRAPH_HPP_
