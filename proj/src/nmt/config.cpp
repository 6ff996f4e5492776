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

#include "kgnmt/nmt/config.hpp"

#include <sstream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"

namespace kgnmt::nmt {

std::string_view to_string(Architecture a) {
  return a == Architecture::rnn ? "rnn" : "transformer";
}

std::string_view to_string(OptimizerKind o) { return o == OptimizerKind::sgd ? "sgd" : "adam"; }

std::string_view to_string(Schedule s) {
  return s == Schedule::constant ? "constant" : "inverse_sqrt";
}

Architecture parse_architecture(std::string_view s) {
  if (s == "rnn") return Architecture::rnn;
  if (s == "transformer") return Architecture::transformer;
  throw ConfigError("unknown architecture '" + std::string(s) + "' (expected rnn|transformer)");
}

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + std::string(s) + "' (expected sgd|adam)");
}

Schedule parse_schedule(std::string_view s) {
  if (s == "constant") return Schedule::constant;
  if (s == "inverse_sqrt") return Schedule::inverse_sqrt;
  throw ConfigError("unknown schedule '" + std::string(s) +
                    "' (expected constant|inverse_sqrt)");
}

void ModelConfig::validate() const {
  if (emb_dim <= 0 || hidden <= 0 || layers <= 0 || heads <= 0 || ffn <= 0) {
    throw ConfigError("model sizes must be positive");
  }
  if (arch == Architecture::transformer && hidden % heads != 0) {
    throw ConfigError("model dimension " + std::to_string(hidden) +
                      " is not divisible by head count " + std::to_string(heads));
  }
}

ModelConfig ModelConfig::rnn_defaults() {
  ModelConfig c;
  c.arch = Architecture::rnn;
  c.emb_dim = 500;
  c.hidden = 500;
  c.layers = 2;
  return c;
}

ModelConfig ModelConfig::transformer_defaults() {
  ModelConfig c;
  c.arch = Architecture::transformer;
  c.emb_dim = 512;
  c.hidden = 512;
  c.layers = 6;
  c.heads = 8;
  c.ffn = 2048;
  return c;
}

void TrainConfig::validate() const {
  if (batch_size <= 0 || token_batch <= 0) throw ConfigError("batch sizes must be positive");
  if (!(lr > 0)) throw ConfigError("learning rate must be positive");
  if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must be in [0, 1)");
  if (max_len <= 0) throw ConfigError("max_len must be positive");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (warmup <= 0) throw ConfigError("warmup must be positive");
  if (!(clip_norm > 0)) throw ConfigError("clip_norm must be positive");
}

TrainConfig TrainConfig::rnn_defaults() { return TrainConfig{}; }

TrainConfig TrainConfig::transformer_defaults() {
  TrainConfig c;
  c.arch = Architecture::transformer;
  c.token_batch = 4096;
  c.optimizer = OptimizerKind::adam;
  c.lr = 2.0;
  c.schedule = Schedule::inverse_sqrt;
  c.warmup = 8000;
  c.dropout = 0.1;
  return c;
}

namespace {

using KV = std::map<std::string, std::string>;

const std::string* get(const KV& kv, const char* key) {
  auto it = kv.find(key);
  return it == kv.end() ? nullptr : &it->second;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  int x = 0;
  try {
    x = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true|false, got '" + v + "'");
}

std::string fmt(double x) { return format_real(x); }

}  // namespace

ModelConfig model_config_from(const KV& kv, ModelConfig c) {
  if (auto v = get(kv, "nmt.arch")) c.arch = parse_architecture(*v);
  if (auto v = get(kv, "nmt.emb_dim")) c.emb_dim = to_int("nmt.emb_dim", *v);
  if (auto v = get(kv, "nmt.hidden")) c.hidden = to_int("nmt.hidden", *v);
  if (auto v = get(kv, "nmt.layers")) c.layers = to_int("nmt.layers", *v);
  if (auto v = get(kv, "nmt.heads")) c.heads = to_int("nmt.heads", *v);
  if (auto v = get(kv, "nmt.ffn")) c.ffn = to_int("nmt.ffn", *v);
  if (auto v = get(kv, "nmt.tie_output")) c.tie_output = to_bool("nmt.tie_output", *v);
  return c;
}

TrainConfig train_config_from(const KV& kv, TrainConfig c) {
  if (auto v = get(kv, "nmt.arch")) c.arch = parse_architecture(*v);
  if (auto v = get(kv, "nmt.batch_size")) c.batch_size = to_int("nmt.batch_size", *v);
  if (auto v = get(kv, "nmt.token_batch")) c.token_batch = to_int("nmt.token_batch", *v);
  if (auto v = get(kv, "nmt.optimizer")) c.optimizer = parse_optimizer(*v);
  if (auto v = get(kv, "nmt.lr")) c.lr = to_double("nmt.lr", *v);
  if (auto v = get(kv, "nmt.schedule")) c.schedule = parse_schedule(*v);
  if (auto v = get(kv, "nmt.warmup")) c.warmup = to_int("nmt.warmup", *v);
  if (auto v = get(kv, "nmt.dropout")) c.dropout = to_double("nmt.dropout", *v);
  if (auto v = get(kv, "nmt.max_len")) c.max_len = to_int("nmt.max_len", *v);
  if (auto v = get(kv, "nmt.epochs")) c.epochs = to_int("nmt.epochs", *v);
  if (auto v = get(kv, "nmt.seed")) c.seed = static_cast<std::uint64_t>(std::stoull(*v));
  if (auto v = get(kv, "nmt.clip_norm")) c.clip_norm = to_double("nmt.clip_norm", *v);
  return c;
}

KV to_kv(const ModelConfig& c) {
  return {{"nmt.arch", std::string(to_string(c.arch))},
          {"nmt.emb_dim", std::to_string(c.emb_dim)},
          {"nmt.hidden", std::to_string(c.hidden)},
          {"nmt.layers", std::to_string(c.layers)},
          {"nmt.heads", std::to_string(c.heads)},
          {"nmt.ffn", std::to_string(c.ffn)},
          {"nmt.tie_output", c.tie_output ? "true" : "false"}};
}

KV to_kv(const TrainConfig& c) {
  return {{"nmt.arch", std::string(to_string(c.arch))},
          {"nmt.batch_size", std::to_string(c.batch_size)},
          {"nmt.token_batch", std::to_string(c.token_batch)},
          {"nmt.optimizer", std::string(to_string(c.optimizer))},
          {"nmt.lr", fmt(c.lr)},
          {"nmt.schedule", std::string(to_string(c.schedule))},
          {"nmt.warmup", std::to_string(c.warmup)},
          {"nmt.dropout", fmt(c.dropout)},
          {"nmt.max_len", std::to_string(c.max_len)},
          {"nmt.epochs", std::to_string(c.epochs)},
          {"nmt.seed", std::to_string(c.seed)},
          {"nmt.clip_norm", fmt(c.clip_norm)}};
}

}  // namespace kgnmt::nmt
