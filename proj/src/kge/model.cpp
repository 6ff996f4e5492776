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

#include "kgnmt/kge/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/kge/subword.hpp"

namespace kgnmt::kge {

void KgeConfig::validate() const {
  if (dim < 1) throw ConfigError("kge.dim must be >= 1");
  if (epochs < 1) throw ConfigError("kge.epochs must be >= 1");
  if (!(lr > 0)) throw ConfigError("kge.lr must be > 0");
  if (threads < 1) throw ConfigError("kge.threads must be >= 1");
  if (min_subword < 1 || min_subword > max_subword) {
    throw ConfigError("kge.minn must be >= 1 and <= kge.maxn");
  }
  if (mode == KgeMode::semantic) {
    if (bucket_count == 0 || (bucket_count & (bucket_count - 1)) != 0) {
      throw ConfigError("kge.buckets must be a power of two");
    }
  }
}

KgeModel::KgeModel(const KgeConfig& config, const kb::KgeRecordSet& records)
    : config_(config) {
  config_.validate();
  if (records.empty()) throw Error("train_kge: no records");

  auto intern = [&](const std::string& tok) {
    auto [it, inserted] = token_index_.emplace(tok, static_cast<int>(tokens_.size()));
    if (inserted) tokens_.push_back(tok);
    return it->second;
  };
  std::map<std::string, std::uint64_t> label_freq;
  for (const auto& r : records.records) {
    for (const auto& f : r.features) intern(f);
    intern(r.label);
    ++label_freq[r.label];
  }
  tree_ = build_huffman(label_freq);

  if (config_.uses_subwords()) {
    for (const auto& tok : tokens_) {
      for (const auto& g : subword_ngrams(tok, config_.min_subword, config_.max_subword)) {
        const auto b = subword_bucket(g, config_.bucket_count);
        bucket_slots_.emplace(b, static_cast<int>(bucket_slots_.size()));
      }
    }
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(tokens_.size() + bucket_slots_.size());
  input_.resize(config_.dim, rows);
  std::mt19937_64 rng(config_.seed);
  std::uniform_real_distribution<float> init(-1.0f / config_.dim, 1.0f / config_.dim);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < config_.dim; ++i) input_(i, j) = init(rng);
  }
  nodes_.setZero(config_.dim, static_cast<Eigen::Index>(tree_.internal_count()));

  encoded_.reserve(records.size());
  for (const auto& r : records.records) encoded_.push_back(encode(r));
}

int KgeModel::token_id(std::string_view token) const {
  auto it = token_index_.find(std::string(token));
  return it == token_index_.end() ? -1 : it->second;
}

std::optional<int> KgeModel::bucket_slot(std::uint32_t bucket) const {
  auto it = bucket_slots_.find(bucket);
  if (it == bucket_slots_.end()) return std::nullopt;
  return static_cast<int>(tokens_.size()) + it->second;
}

std::vector<int> KgeModel::input_ids(std::string_view token) const {
  std::vector<int> ids;
  if (const int id = token_id(token); id >= 0) ids.push_back(id);
  if (config_.uses_subwords()) {
    for (const auto& g : subword_ngrams(token, config_.min_subword, config_.max_subword)) {
      bucket_accesses_.n.fetch_add(1, std::memory_order_relaxed);
      if (auto slot = bucket_slot(subword_bucket(g, config_.bucket_count))) {
        ids.push_back(*slot);
      }
    }
  }
  return ids;
}

EncodedRecord KgeModel::encode(const kb::KgeRecord& r) const {
  EncodedRecord e;
  for (const auto& f : r.features) {
    const auto ids = input_ids(f);
    e.inputs.insert(e.inputs.end(), ids.begin(), ids.end());
  }
  e.label = tree_.leaf(r.label);
  if (e.label < 0) throw Error("internal: label '" + r.label + "' missing from Huffman tree");
  return e;
}

Eigen::VectorXf KgeModel::hidden(std::span<const std::string> features) const {
  std::vector<int> ids;
  for (const auto& f : features) {
    const auto fi = input_ids(f);
    ids.insert(ids.end(), fi.begin(), fi.end());
  }
  return bag_mean(input_, ids);
}

std::vector<float> KgeModel::label_log_probs(const Eigen::VectorXf& hidden) const {
  return kge::label_log_probs<float>(hidden, nodes_, tree_);
}

std::optional<Eigen::VectorXf> KgeModel::vector(std::string_view token) const {
  const int id = token_id(token);
  if (!config_.uses_subwords()) {
    if (id < 0) return std::nullopt;
    return Eigen::VectorXf(input_.col(id));
  }
  const auto grams = subword_ngrams(token, config_.min_subword, config_.max_subword);
  Eigen::VectorXf v = Eigen::VectorXf::Zero(config_.dim);
  std::size_t count = 0;
  if (id >= 0) {
    v += input_.col(id);
    ++count;
  }
  for (const auto& g : grams) {
    bucket_accesses_.n.fetch_add(1, std::memory_order_relaxed);
    if (auto slot = bucket_slot(subword_bucket(g, config_.bucket_count))) v += input_.col(*slot);
    ++count;
  }
  return Eigen::VectorXf(v / static_cast<float>(count));
}

KgEmbedding KgeModel::embedding() const {
  KgEmbedding emb;
  emb.mode = config_.mode;
  emb.vectors = fusion::EmbeddingTable(config_.dim);
  for (const auto& tok : tokens_) emb.vectors.add(tok, *vector(tok));
  if (config_.uses_subwords()) {
    emb.subwords = SubwordSpec{config_.min_subword, config_.max_subword, config_.bucket_count};
    for (const auto& [bucket, slot] : bucket_slots_) {
      emb.buckets.emplace(bucket, input_.col(static_cast<Eigen::Index>(tokens_.size()) + slot));
    }
  }
  return emb;
}

double KgeModel::loss() const {
  return hs_objective<float>(input_, nodes_, encoded_, tree_);
}

void KgeModel::train() {
  const std::size_t n = encoded_.size();
  const double total = static_cast<double>(config_.epochs) * static_cast<double>(n);
  std::atomic<std::size_t> processed{0};
  const int threads = static_cast<int>(std::min<std::size_t>(config_.threads, n));

  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    std::vector<double> thread_loss(threads, 0.0);
    auto worker = [&](int t) {
      const std::size_t begin = n * t / threads;
      const std::size_t end = n * (t + 1) / threads;
      std::vector<std::size_t> order(end - begin);
      std::iota(order.begin(), order.end(), begin);
      std::mt19937_64 rng(config_.seed ^ (0x9E3779B97F4A7C15ull * (epoch + 1)) ^
                          (static_cast<std::uint64_t>(t) << 32));
      std::shuffle(order.begin(), order.end(), rng);

      Vec<float> grad(config_.dim);
      double loss = 0;
      for (std::size_t idx : order) {
        const auto& rec = encoded_[idx];
        const double progress = static_cast<double>(processed.fetch_add(1)) / total;
        const float lr = static_cast<float>(config_.lr * std::max(0.0, 1.0 - progress));
        const Vec<float> h = bag_mean(input_, rec.inputs);
        grad.setZero();
        loss += path_loss<float>(h, nodes_, tree_.path(rec.label), tree_.code(rec.label), &grad,
                                 [&](int node, float g) { nodes_.col(node) -= (lr * g) * h; });
        const float scale = lr / static_cast<float>(rec.inputs.size());
        for (int id : rec.inputs) input_.col(id) -= scale * grad;
      }
      thread_loss[t] = loss;
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    epoch_loss_.push_back(std::accumulate(thread_loss.begin(), thread_loss.end(), 0.0) /
                          static_cast<double>(n));
    if (!std::isfinite(epoch_loss_.back())) {
      throw Error("KGE training diverged at epoch " + std::to_string(epoch + 1) +
                  " (non-finite loss); lower kge.lr");
    }
  }
}

KgeModel train_kge(const kb::KgeRecordSet& records, const KgeConfig& config) {
  KgeModel model(config, records);
  model.train();
  return model;
}

std::optional<Eigen::VectorXf> kge_vector(const KgEmbedding& emb, std::string_view token) {
  if (const int i = emb.vectors.index(token); i >= 0) {
    return Eigen::VectorXf(emb.vectors.vector(i));
  }
  if (emb.mode != KgeMode::semantic || !emb.subwords || token.empty()) return std::nullopt;
  const auto& spec = *emb.subwords;
  const auto grams = subword_ngrams(token, spec.min_n, spec.max_n);
  Eigen::VectorXf v = Eigen::VectorXf::Zero(emb.dim());
  for (const auto& g : grams) {
    if (auto it = emb.buckets.find(subword_bucket(g, spec.buckets)); it != emb.buckets.end()) {
      v += it->second;
    }
  }
  return Eigen::VectorXf(v / static_cast<float>(grams.size()));
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const KgEmbedding& emb,
                                                              std::string_view token, int k) {
  if (k < 1) throw Error("nearest_neighbors: k must be >= 1");
  const auto q = kge_vector(emb, token);
  if (!q) throw Error("nearest_neighbors: token '" + std::string(token) + "' does not resolve");
  const double qn = q->cast<double>().norm();
  if (qn == 0) throw Error("nearest_neighbors: zero query vector, cosine undefined");

  std::vector<std::pair<std::string, double>> scored;
  const auto& toks = emb.vectors.tokens();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] == token) continue;
    const Eigen::VectorXd v = emb.vectors.vector(static_cast<int>(i)).cast<double>();
    const double vn = v.norm();
    const double cos = vn == 0 ? 0.0 : q->cast<double>().dot(v) / (qn * vn);
    scored.emplace_back(toks[i], cos);
  }
  const std::size_t keep = std::min<std::size_t>(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  scored.resize(keep);
  return scored;
}

void save_embedding(const std::string& path, const KgEmbedding& emb) {
  fusion::write_embeddings_file(path, emb.vectors);
  const std::string side = path + ".subwords";
  if (!emb.subwords) {
    std::filesystem::remove(side);
    return;
  }
  std::ofstream out(side);
  if (!out) throw Error("cannot write " + side);
  const auto& s = *emb.subwords;
  out << "#subwords v1 minn=" << s.min_n << " maxn=" << s.max_n << " buckets=" << s.buckets
      << " hash=fnv1a32 dim=" << emb.dim() << " count=" << emb.buckets.size() << '\n';
  char buf[32];
  for (const auto& [bucket, v] : emb.buckets) {
    out << bucket;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(v[i]));
      out << buf;
    }
    out << '\n';
  }
}

KgEmbedding load_embedding(const std::string& path) {
  KgEmbedding emb;
  emb.vectors = fusion::read_embeddings_file(path);
  const std::string side = path + ".subwords";
  if (!std::filesystem::exists(side)) return emb;

  const auto lines = read_lines(side);
  if (lines.empty() || !lines[0].starts_with("#subwords v1")) {
    throw FormatError("missing '#subwords v1' header", 1);
  }
  SubwordSpec spec;
  long dim = -1, count = -1;
  for (const auto& field : split_ws(lines[0])) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const auto key = field.substr(0, eq);
    const auto val = field.substr(eq + 1);
    if (key == "minn") spec.min_n = std::stoi(val);
    else if (key == "maxn") spec.max_n = std::stoi(val);
    else if (key == "buckets") spec.buckets = static_cast<std::uint32_t>(std::stoul(val));
    else if (key == "dim") dim = std::stol(val);
    else if (key == "count") count = std::stol(val);
    else if (key == "hash" && val != "fnv1a32") throw FormatError("unsupported hash " + val, 1);
  }
  if (dim != emb.dim()) throw FormatError("subword dimension does not match embeddings", 1);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = split_ws(lines[ln]);
    if (static_cast<long>(fields.size()) != dim + 1) {
      throw FormatError("bad subword row width", ln + 1);
    }
    Eigen::VectorXf v(dim);
    for (long i = 0; i < dim; ++i) v[i] = std::stof(fields[i + 1]);
    emb.buckets.emplace(static_cast<std::uint32_t>(std::stoul(fields[0])), std::move(v));
  }
  if (count >= 0 && static_cast<std::size_t>(count) != emb.buckets.size()) {
    throw FormatError("subword row count does not match header", lines.size());
  }
  emb.mode = KgeMode::semantic;
  emb.subwords = spec;
  return emb;
}

KgeConfig kge_config_from(const std::map<std::string, std::string>& kv) {
  KgeConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (auto v = get("kge.dim")) c.dim = std::stoi(*v);
    if (auto v = get("kge.epochs")) c.epochs = std::stoi(*v);
    if (auto v = get("kge.lr")) c.lr = std::stod(*v);
    if (auto v = get("kge.minn")) c.min_subword = std::stoi(*v);
    if (auto v = get("kge.maxn")) c.max_subword = std::stoi(*v);
    if (auto v = get("kge.buckets")) c.bucket_count = static_cast<std::uint32_t>(std::stoul(*v));
    if (auto v = get("kge.threads")) c.threads = std::stoi(*v);
    if (auto v = get("kge.seed")) c.seed = std::stoull(*v);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad numeric kge value: ") + e.what());
  }
  if (auto v = get("kge.mode")) c.mode = kb::parse_kge_mode(*v);
  return c;
}

}  // namespace kgnmt::kge
