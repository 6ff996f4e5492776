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

#include "kgnmt/nmt/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace kgnmt::nmt {

double learning_rate(const TrainConfig& cfg, int model_dim, long step) {
  if (cfg.schedule == Schedule::constant) return cfg.lr;
  const double s = static_cast<double>(std::max(step, 1L));
  return cfg.lr / std::sqrt(static_cast<double>(model_dim)) *
         std::min(1.0 / std::sqrt(s), s * std::pow(static_cast<double>(cfg.warmup), -1.5));
}

template <typename S>
double Optimizer<S>::update(const std::vector<Parameter<S>*>& params) {
  ++step_;
  const double lr = learning_rate(cfg_, model_dim_, step_);
  const S a = static_cast<S>(lr);
  if (cfg_.optimizer == OptimizerKind::sgd) {
    for (Parameter<S>* p : params) {
      if (p->grad.size() == 0) continue;
      if (p->mask.size()) {
        p->value.array() -= a * p->grad.array() * p->mask.array();
      } else {
        p->value.noalias() -= a * p->grad;
      }
    }
    return lr;
  }
  const double b1 = 0.9, b2 = 0.98, eps = 1e-9;
  const S c1 = static_cast<S>(1.0 - std::pow(b1, static_cast<double>(step_)));
  const S c2 = static_cast<S>(1.0 - std::pow(b2, static_cast<double>(step_)));
  for (Parameter<S>* p : params) {
    if (p->grad.size() == 0) continue;
    if (p->m.size() == 0) {
      p->m.setZero(p->value.rows(), p->value.cols());
      p->v.setZero(p->value.rows(), p->value.cols());
    }
    p->m = S(b1) * p->m + S(1 - b1) * p->grad;
    p->v = S(b2) * p->v + S(1 - b2) * p->grad.cwiseAbs2();
    auto step = (a * (p->m.array() / c1) / ((p->v.array() / c2).sqrt() + S(eps))).eval();
    if (p->mask.size()) step *= p->mask.array();
    p->value.array() -= step;
  }
  return lr;
}

template <typename S>
double clip_gradients(const std::vector<Parameter<S>*>& params, double max_norm) {
  double sq = 0;
  for (const Parameter<S>* p : params) {
    if (p->grad.size()) sq += static_cast<double>(p->grad.squaredNorm());
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const S f = static_cast<S>(max_norm / norm);
    for (Parameter<S>* p : params) {
      if (p->grad.size()) p->grad *= f;
    }
  }
  return norm;
}

std::vector<std::vector<std::size_t>> make_batches(std::span<const Example> corpus,
                                                   const std::vector<std::size_t>& usable,
                                                   const TrainConfig& cfg, std::mt19937_64& rng) {
  std::vector<std::size_t> order = usable;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  if (cfg.arch == Architecture::rnn) {
    std::map<std::size_t, std::vector<std::size_t>> by_len;
    for (std::size_t i : order) by_len[corpus[i].src.size()].push_back(i);
    for (auto& [len, ids] : by_len) {
      for (std::size_t s = 0; s < ids.size(); s += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t e = std::min(ids.size(), s + static_cast<std::size_t>(cfg.batch_size));
        batches.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(s),
                             ids.begin() + static_cast<std::ptrdiff_t>(e));
      }
    }
  } else {
    std::vector<std::size_t> cur;
    std::size_t tokens = 0;
    for (std::size_t i : order) {
      const std::size_t n = corpus[i].tgt.size() + 1;
      if (!cur.empty() && tokens + n > static_cast<std::size_t>(cfg.token_batch)) {
        batches.push_back(std::move(cur));
        cur.clear();
        tokens = 0;
      }
      cur.push_back(i);
      tokens += n;
    }
    if (!cur.empty()) batches.push_back(std::move(cur));
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

template <typename S>
TrainStats train(Seq2Seq<S>& model, std::span<const Example> corpus, const TrainConfig& cfg,
                 const std::function<void(int, double)>& on_epoch) {
  cfg.validate();
  if (corpus.empty()) throw Error("train: empty corpus");
  TrainStats stats;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& ex = corpus[i];
    const auto max_len = static_cast<std::size_t>(cfg.max_len);
    if (ex.src.empty() || ex.src.size() > max_len || ex.tgt.size() > max_len) {
      ++stats.skipped;
    } else {
      usable.push_back(i);
    }
  }
  if (cfg.epochs == 0) return stats;
  if (usable.empty()) throw Error("train: every pair exceeds max_len " + std::to_string(cfg.max_len));

  std::mt19937_64 rng(cfg.seed);
  auto params = model.parameters();
  Optimizer<S> opt(cfg, model.config().hidden);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto batches = make_batches(corpus, usable, cfg, rng);
    double total = 0;
    long tokens_total = 0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      std::vector<const Example*> batch;
      for (std::size_t i : batches[bi]) batch.push_back(&corpus[i]);
      for (Parameter<S>* p : params) p->zero_grad();
      Graph<S> g;
      int tokens = 0;
      Var<S> loss = model.loss(g, batch, true, static_cast<S>(cfg.dropout), rng, &tokens);
      const double value = static_cast<double>(loss.value()(0, 0));
      if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "non-finite loss at epoch " << epoch << ", batch " << bi + 1 << " of "
           << batches.size() << " (lr " << learning_rate(cfg, model.config().hidden, opt.steps() + 1)
           << ", " << batch.size() << " pairs, " << tokens << " target tokens, first pair index "
           << batches[bi].front() << ")";
        throw TrainingError(os.str());
      }
      g.backward(scale(loss, S(1) / static_cast<S>(tokens)));
      clip_gradients(params, cfg.clip_norm);
      opt.update(params);
      total += value;
      tokens_total += tokens;
    }
    const double mean = total / static_cast<double>(std::max(tokens_total, 1L));
    stats.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  stats.updates = opt.steps();
  return stats;
}

template <typename S>
double evaluate_loss(Seq2Seq<S>& model, std::span<const Example> corpus, int batch_size) {
  TrainConfig cfg;
  cfg.arch = model.config().arch;
  cfg.batch_size = batch_size;
  cfg.token_batch = 2048;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].src.empty()) usable.push_back(i);
  }
  std::mt19937_64 rng(0);
  double total = 0;
  long tokens_total = 0;
  for (const auto& b : make_batches(corpus, usable, cfg, rng)) {
    std::vector<const Example*> batch;
    for (std::size_t i : b) batch.push_back(&corpus[i]);
    Graph<S> g;
    int tokens = 0;
    total += static_cast<double>(model.loss(g, batch, false, S(0), rng, &tokens).value()(0, 0));
    tokens_total += tokens;
  }
  return total / static_cast<double>(std::max(tokens_total, 1L));
}

template class Optimizer<float>;
template class Optimizer<double>;
template double clip_gradients(const std::vector<Parameter<float>*>&, double);
template double clip_gradients(const std::vector<Parameter<double>*>&, double);
template TrainStats train(Seq2Seq<float>&, std::span<const Example>, const TrainConfig&,
                          const std::function<void(int, double)>&);
template TrainStats train(Seq2Seq<double>&, std::span<const Example>, const TrainConfig&,
                          const std::function<void(int, double)>&);
template double evaluate_loss(Seq2Seq<float>&, std::span<const Example>, int);
template double evaluate_loss(Seq2Seq<double>&, std::span<const Example>, int);

}  // namespace kgnmt::nmt
