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

#ifndef KGNMT_KGE_OBJECTIVE_HPP_
#define KGNMT_KGE_OBJECTIVE_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "kgnmt/kge/huffman.hpp"

namespace kgnmt::kge {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// A record with its feature tokens resolved to input-matrix columns
// (token rows and, in semantic mode, subword bucket rows) and its label
// resolved to a Huffman leaf.
struct EncodedRecord {
  std::vector<int> inputs;
  int label = 0;
};

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  using std::exp;
  using std::log1p;
  return x >= 0 ? -log1p(exp(-x)) : x - log1p(exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  return x >= 0 ? Scalar(1) / (Scalar(1) + exp(-x)) : exp(x) / (Scalar(1) + exp(x));
}

// Mean of the selected input columns (the bag-of-words vector z).
template <typename Derived>
auto bag_mean(const Eigen::MatrixBase<Derived>& input, const std::vector<int>& ids) {
  using Scalar = typename Derived::Scalar;
  Vec<Scalar> h = Vec<Scalar>::Zero(input.rows());
  for (int id : ids) h += input.col(id);
  if (!ids.empty()) h /= Scalar(ids.size());
  return h;
}

// Hierarchical-softmax loss -log p(leaf | hidden) along one Huffman path.
// For each internal node visited, `on_node(node, g)` receives
// g = dLoss/d(score) with score = node_vector . hidden; dLoss/dhidden is
// accumulated into `grad_hidden` using the node vectors as they were before
// the callback runs, so the callback may update the node in place.
template <typename Scalar, typename NodeMat, typename OnNode>
Scalar path_loss(const Vec<Scalar>& hidden, NodeMat& nodes, const std::vector<int>& path,
                 const std::vector<bool>& code, Vec<Scalar>* grad_hidden, OnNode&& on_node) {
  Scalar loss = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const int node = path[k];
    const Scalar score = nodes.col(node).dot(hidden);
    const Scalar bit = code[k] ? Scalar(1) : Scalar(0);
    loss -= code[k] ? log_sigmoid(score) : log_sigmoid(-score);
    const Scalar g = sigmoid(score) - bit;
    if (grad_hidden) *grad_hidden += g * nodes.col(node);
    on_node(node, g);
  }
  return loss;
}

// Mean hierarchical-softmax loss over all records, with exact gradients
// with respect to the input matrix and the node matrix when requested.
template <typename Scalar>
Scalar hs_objective(const Mat<Scalar>& input, const Mat<Scalar>& nodes,
                    const std::vector<EncodedRecord>& records, const HuffmanTree& tree,
                    Mat<Scalar>* grad_input = nullptr, Mat<Scalar>* grad_nodes = nullptr) {
  if (grad_input) grad_input->setZero(input.rows(), input.cols());
  if (grad_nodes) grad_nodes->setZero(nodes.rows(), nodes.cols());
  const Scalar inv_n = Scalar(1) / Scalar(records.size());
  Scalar total = 0;
  Vec<Scalar> gh(input.rows());
  for (const auto& r : records) {
    const Vec<Scalar> h = bag_mean(input, r.inputs);
    gh.setZero();
    total += path_loss<Scalar>(h, nodes, tree.path(r.label), tree.code(r.label), &gh,
                               [&](int node, Scalar g) {
                                 if (grad_nodes) grad_nodes->col(node) += inv_n * g * h;
                               });
    if (grad_input) {
      const Scalar scale = inv_n / Scalar(r.inputs.size());
      for (int id : r.inputs) grad_input->col(id) += scale * gh;
    }
  }
  return total * inv_n;
}

// log p(label | hidden) for every leaf, by walking the tree from the root.
template <typename Scalar, typename NodeMat>
std::vector<Scalar> label_log_probs(const Vec<Scalar>& hidden, const NodeMat& nodes,
                                    const HuffmanTree& tree) {
  const int n = static_cast<int>(tree.leaf_count());
  std::vector<Scalar> out(n, Scalar(0));
  if (n == 1) return out;
  std::vector<std::pair<int, Scalar>> stack{{tree.root(), Scalar(0)}};
  while (!stack.empty()) {
    auto [id, lp] = stack.back();
    stack.pop_back();
    if (id < n) {
      out[id] = lp;
      continue;
    }
    const int internal = id - n;
    const Scalar score = nodes.col(internal).dot(hidden);
    const auto [left, right] = tree.children(internal);
    stack.emplace_back(left, lp + log_sigmoid(-score));
    stack.emplace_back(right, lp + log_sigmoid(score));
  }
  return out;
}

}  // namespace kgnmt::kge

#endif  // KGNMT_KGE_OBJECTIVE_HPP_
