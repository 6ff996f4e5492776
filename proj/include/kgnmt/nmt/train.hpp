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

#ifndef KGNMT_NMT_TRAIN_HPP_
#define KGNMT_NMT_TRAIN_HPP_

#include <functional>
#include <span>
#include <vector>

#include "kgnmt/common/error.hpp"
#include "kgnmt/nmt/config.hpp"
#include "kgnmt/nmt/model.hpp"

namespace kgnmt::nmt {

// Raised when a batch produces a non-finite loss.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Learning rate at 1-based update `step`. inverse_sqrt follows
// lr * d^-0.5 * min(step^-0.5, step * warmup^-1.5).
double learning_rate(const TrainConfig& cfg, int model_dim, long step);

template <typename S>
class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, int model_dim) : cfg_(cfg), model_dim_(model_dim) {}

  // Applies one update from the accumulated gradients (honoring masks)
  // and returns the learning rate used.
  double update(const std::vector<Parameter<S>*>& params);
  long steps() const { return step_; }

 private:
  TrainConfig cfg_;
  int model_dim_;
  long step_ = 0;
};

// Scales all gradients so that their global L2 norm is at most max_norm;
// returns the norm before scaling.
template <typename S>
double clip_gradients(const std::vector<Parameter<S>*>& params, double max_norm);

struct TrainStats {
  std::vector<double> epoch_loss;  // mean per-token training loss
  std::size_t skipped = 0;         // pairs beyond max_len or with an empty side
  long updates = 0;
};

// Batches for one epoch. RNN batches share a source length and hold at
// most batch_size pairs; Transformer batches hold about token_batch target
// tokens. `usable` lists the pair indices to draw from.
std::vector<std::vector<std::size_t>> make_batches(std::span<const Example> corpus,
                                                   const std::vector<std::size_t>& usable,
                                                   const TrainConfig& cfg, std::mt19937_64& rng);

// Teacher-forced cross-entropy training. Deterministic for a fixed seed.
// `on_epoch(epoch, mean_loss)` is called after every epoch.
template <typename S>
TrainStats train(Seq2Seq<S>& model, std::span<const Example> corpus, const TrainConfig& cfg,
                 const std::function<void(int, double)>& on_epoch = {});

// Mean per-token cross-entropy without dropout.
template <typename S>
double evaluate_loss(Seq2Seq<S>& model, std::span<const Example> corpus, int batch_size = 32);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_TRAIN_HPP_
