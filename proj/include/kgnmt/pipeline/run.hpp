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

#ifndef KGNMT_PIPELINE_RUN_HPP_
#define KGNMT_PIPELINE_RUN_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/eval/metrics.hpp"
#include "kgnmt/kb/lexicon.hpp"
#include "kgnmt/nmt/model.hpp"
#include "kgnmt/nmt/unk.hpp"
#include "kgnmt/pipeline/config.hpp"
#include "kgnmt/tok/vocab.hpp"

namespace kgnmt::pipeline {

struct StageTiming {
  std::string name;
  double seconds = 0;
};

struct ExperimentManifest {
  KeyValues config;
  std::map<std::string, std::string> inputs;     // config key -> content hash
  std::map<std::string, std::string> artifacts;  // file name -> content hash
  std::map<std::string, std::string> seeds;
  std::vector<StageTiming> stages;
  std::string version;
  std::string status;  // "completed" or "failed"
  std::string failed_stage;
  std::string error;
  std::optional<eval::EvalReport> report;

  // Pretty-printed JSON with sorted keys.
  std::string to_json() const;
};

// A stage threw; the run directory holds a manifest with the failed stage.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, std::string run_dir, const std::string& what)
      : Error("stage " + stage + " failed: " + what),
        stage_(std::move(stage)),
        run_dir_(std::move(run_dir)) {}
  const std::string& stage() const { return stage_; }
  const std::string& run_dir() const { return run_dir_; }

 private:
  std::string stage_;
  std::string run_dir_;
};

struct RunResult {
  std::string run_dir;
  ExperimentManifest manifest;
  eval::EvalReport report;
};

// Creates output_dir/run-NNNN (the first free number) and runs every stage
// of the configured strategy there. Progress lines go to log when given.
RunResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

struct TranslateOptions {
  int beam = 5;
  int max_len = 100;
  nmt::UnkMode unk = nmt::UnkMode::off;
  const kb::BilingualLexicon* lexicon = nullptr;
  bool strip_annotations = true;
  bool debpe = false;
};

// Beam-decodes every source sentence, then applies UNK replacement,
// annotation stripping and BPE joining as requested.
std::vector<Sentence> translate(nmt::Seq2Seq<float>& model, const tok::Vocabulary& src_vocab,
                                const tok::Vocabulary& tgt_vocab,
                                std::span<const Sentence> sources, const TranslateOptions& opts);

// Atomic write: a temporary sibling file renamed over path.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace kgnmt::pipeline

#endif  // KGNMT_PIPELINE_RUN_HPP_
