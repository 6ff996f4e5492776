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

#ifndef KGNMT_KGE_HUFFMAN_HPP_
#define KGNMT_KGE_HUFFMAN_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kgnmt::kge {

// Huffman coding of the label set for hierarchical softmax.
//
// Node ids: leaves 0..n-1 (labels in lexicographic order), internal nodes
// n..2n-2 in creation order; the root is the last internal node. Paths are
// given as internal-node indices (node id - n), root first, and code bit 1
// means "right child". A single label yields an empty path.
class HuffmanTree {
 public:
  std::size_t leaf_count() const { return labels_.size(); }
  std::size_t internal_count() const { return children_.size(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  int leaf(std::string_view label) const;

  const std::vector<int>& path(int leaf) const { return paths_[leaf]; }
  const std::vector<bool>& code(int leaf) const { return codes_[leaf]; }

  // Children of internal node `i` as node ids.
  std::pair<int, int> children(int internal) const { return children_[internal]; }
  int root() const;

  // sum(freq * code length)
  std::uint64_t weighted_length() const;

 private:
  friend HuffmanTree build_huffman(const std::map<std::string, std::uint64_t>&);
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::vector<int>> paths_;
  std::vector<std::vector<bool>> codes_;
  std::vector<std::pair<int, int>> children_;
  std::map<std::string, int, std::less<>> leaf_of_;
};

// Ties are broken by node id: lexicographically smaller labels first,
// leaves before internal nodes. Throws on an empty map or a zero count.
HuffmanTree build_huffman(const std::map<std::string, std::uint64_t>& label_freqs);

}  // namespace kgnmt::kge

#endif  // KGNMT_KGE_HUFFMAN_HPP_
