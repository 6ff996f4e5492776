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

#ifndef KGNMT_PIPELINE_CONFIG_HPP_
#define KGNMT_PIPELINE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/common/error.hpp"
#include "kgnmt/kge/model.hpp"
#include "kgnmt/nmt/config.hpp"
#include "kgnmt/nmt/unk.hpp"

namespace kgnmt::pipeline {

using KeyValues = std::map<std::string, std::string>;

// Every diagnostic of a failed validation, each starting with its key.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// "key = value" lines; '#' starts a comment, blank lines are ignored.
// Throws ConfigErrors listing malformed lines and duplicate keys.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::string& path);

enum class Strategy { baseline, el_kge, sem_kge };
enum class Tokenization { word, bpe };

std::string_view to_string(Strategy s);
std::string_view to_string(Tokenization t);

struct PipelineConfig {
  // paths
  std::string kb_source;
  std::string kb_target;
  std::string train_source;
  std::string train_target;
  std::string test_source;
  std::string test_target;
  std::string test_entities;  // optional
  std::string output_dir;

  Strategy strategy = Strategy::baseline;
  Tokenization tokenization = Tokenization::word;
  nmt::UnkMode unk = nmt::UnkMode::off;
  std::uint64_t seed = 1;
  bool deterministic = true;

  int bpe_merges = 32000;
  int bpe_min_frequency = 2;
  int vocab_max_size = 50000;
  bool vocab_extend = true;  // add KB lexicalizations (KG strategies)

  int el_max_span = 5;
  std::string el_source_prefix = "dbr_";
  std::string el_target_prefix = "dbr_de_";

  int kge_max_bag = 50;
  kge::KgeConfig kge;

  bool fusion_freeze = false;

  nmt::ModelConfig model;
  nmt::TrainConfig train;

  int beam = 5;
  int max_output_len = 100;

  // Every accepted key with its effective value (defaults applied).
  KeyValues echo() const;
};

// Documented keys and their defaults.
const KeyValues& default_values();

// Parses and checks every key; throws ConfigErrors with all problems at
// once (unknown keys, type errors, missing or nonexistent paths, invariant
// violations).
PipelineConfig validate_config(const KeyValues& kv);
PipelineConfig load_config(const std::string& path);

}  // namespace kgnmt::pipeline

#endif  // KGNMT_PIPELINE_CONFIG_HPP_
