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

#include "kgnmt/kge/huffman.hpp"

#include <queue>
#include <tuple>

#include "kgnmt/common/error.hpp"

namespace kgnmt::kge {

int HuffmanTree::leaf(std::string_view label) const {
  auto it = leaf_of_.find(label);
  return it == leaf_of_.end() ? -1 : it->second;
}

int HuffmanTree::root() const {
  return children_.empty() ? 0 : static_cast<int>(labels_.size() + children_.size() - 1);
}

std::uint64_t HuffmanTree::weighted_length() const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) total += counts_[i] * codes_[i].size();
  return total;
}

HuffmanTree build_huffman(const std::map<std::string, std::uint64_t>& label_freqs) {
  if (label_freqs.empty()) throw Error("build_huffman: no labels");
  HuffmanTree tree;
  for (const auto& [label, count] : label_freqs) {
    if (count == 0) throw Error("build_huffman: zero count for label '" + label + "'");
    tree.leaf_of_.emplace(label, static_cast<int>(tree.labels_.size()));
    tree.labels_.push_back(label);
    tree.counts_.push_back(count);
  }
  const int n = static_cast<int>(tree.labels_.size());
  tree.paths_.assign(n, {});
  tree.codes_.assign(n, {});
  if (n == 1) return tree;

  using Item = std::tuple<std::uint64_t, int>;  // (weight, node id)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int i = 0; i < n; ++i) heap.emplace(tree.counts_[i], i);

  std::vector<int> parent(2 * n - 1, -1);
  std::vector<bool> is_right(2 * n - 1, false);
  int next = n;
  while (heap.size() > 1) {
    auto [wa, a] = heap.top();
    heap.pop();
    auto [wb, b] = heap.top();
    heap.pop();
    tree.children_.emplace_back(a, b);
    parent[a] = next;
    parent[b] = next;
    is_right[b] = true;
    heap.emplace(wa + wb, next);
    ++next;
  }

  for (int leaf = 0; leaf < n; ++leaf) {
    std::vector<int> path;
    std::vector<bool> code;
    for (int node = leaf; parent[node] != -1; node = parent[node]) {
      path.push_back(parent[node] - n);
      code.push_back(is_right[node]);
    }
    tree.paths_[leaf].assign(path.rbegin(), path.rend());
    tree.codes_[leaf].assign(code.rbegin(), code.rend());
  }
  return tree;
}

}  // namespace kgnmt::kge
