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

#ifndef KGNMT_NMT_CONFIG_HPP_
#define KGNMT_NMT_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace kgnmt::nmt {

enum class Architecture { rnn, transformer };
enum class OptimizerKind { sgd, adam };
enum class Schedule { constant, inverse_sqrt };

std::string_view to_string(Architecture a);
std::string_view to_string(OptimizerKind o);
std::string_view to_string(Schedule s);
Architecture parse_architecture(std::string_view s);
OptimizerKind parse_optimizer(std::string_view s);
Schedule parse_schedule(std::string_view s);

// Shape of a model. The defaults are desk scale.
struct ModelConfig {
  Architecture arch = Architecture::rnn;
  int emb_dim = 64;   // m (m + d after concat fusion)
  int hidden = 64;    // n: per-direction LSTM size, d_model for the Transformer
  int layers = 2;     // per stack
  int heads = 8;
  int ffn = 256;
  bool tie_output = true;

  // Throws ConfigError on a non-positive size or hidden % heads != 0
  // (Transformer).
  void validate() const;

  static ModelConfig rnn_defaults();          // 500 / 500, 2 layers
  static ModelConfig transformer_defaults();  // 512, 8 heads, 6 layers

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainConfig {
  Architecture arch = Architecture::rnn;
  int batch_size = 32;          // sentences (RNN)
  int token_batch = 4096;       // target tokens per batch (Transformer)
  OptimizerKind optimizer = OptimizerKind::sgd;
  double lr = 0.0002;
  Schedule schedule = Schedule::constant;
  int warmup = 8000;
  double dropout = 0.3;
  int max_len = 80;
  int epochs = 10;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;

  void validate() const;

  // SGD 0.0002, batch 32, dropout 0.3, max length 80.
  static TrainConfig rnn_defaults();
  // Adam, inverse square-root warmup scaled by 2, 4096-token batches,
  // dropout 0.1.
  static TrainConfig transformer_defaults();

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Keys nmt.arch, nmt.emb_dim, nmt.hidden, nmt.layers, nmt.heads, nmt.ffn,
// nmt.tie_output. Missing keys keep the defaults of `base`.
ModelConfig model_config_from(const std::map<std::string, std::string>& kv,
                              ModelConfig base = {});
// Keys nmt.batch_size, nmt.token_batch, nmt.optimizer, nmt.lr,
// nmt.schedule, nmt.warmup, nmt.dropout, nmt.max_len, nmt.epochs,
// nmt.seed, nmt.clip_norm.
TrainConfig train_config_from(const std::map<std::string, std::string>& kv,
                              TrainConfig base = {});

std::map<std::string, std::string> to_kv(const ModelConfig& c);
std::map<std::string, std::string> to_kv(const TrainConfig& c);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_CONFIG_HPP_
