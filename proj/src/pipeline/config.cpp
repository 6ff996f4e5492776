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

#include "kgnmt/pipeline/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>

#include "kgnmt/common/text.hpp"

namespace kgnmt::pipeline {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string summarize(const std::vector<std::string>& errors) {
  std::string msg = std::to_string(errors.size()) + " configuration error" +
                    (errors.size() == 1 ? "" : "s");
  for (const auto& e : errors) msg += "\n  " + e;
  return msg;
}

enum class Kind { path, opt_path, dir, text, integer, uint64, real, boolean, choice };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* fallback;
  std::vector<std::string> choices = {};
  long min = 0;  // integers: inclusive lower bound
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> s = {
      {"kb.source", Kind::opt_path, ""},
      {"kb.target", Kind::opt_path, ""},
      {"corpus.train.source", Kind::path, ""},
      {"corpus.train.target", Kind::path, ""},
      {"corpus.test.source", Kind::path, ""},
      {"corpus.test.target", Kind::path, ""},
      {"corpus.test.entities", Kind::opt_path, ""},
      {"output_dir", Kind::dir, ""},
      {"strategy", Kind::choice, "baseline", {"baseline", "el_kge", "sem_kge"}},
      {"tokenization", Kind::choice, "word", {"word", "bpe"}},
      {"unk", Kind::choice, "off", {"off", "copy", "copy_only", "lexicon_then_copy"}},
      {"seed", Kind::uint64, "1"},
      {"deterministic", Kind::boolean, "true"},
      {"bpe.merges", Kind::integer, "32000", {}, 0},
      {"bpe.min_frequency", Kind::integer, "2", {}, 1},
      {"vocab.max_size", Kind::integer, "50000", {}, 5},
      {"vocab.extend", Kind::boolean, "true"},
      {"el.max_span", Kind::integer, "5", {}, 1},
      {"el.source_prefix", Kind::text, "dbr_"},
      {"el.target_prefix", Kind::text, "dbr_de_"},
      {"kge.dim", Kind::integer, "64", {}, 1},
      {"kge.epochs", Kind::integer, "5", {}, 1},
      {"kge.lr", Kind::real, "0.05"},
      {"kge.minn", Kind::integer, "2", {}, 1},
      {"kge.maxn", Kind::integer, "5", {}, 1},
      {"kge.buckets", Kind::integer, "2097152", {}, 1},
      {"kge.threads", Kind::integer, "1", {}, 1},
      {"kge.seed", Kind::uint64, "1"},
      {"kge.max_bag", Kind::integer, "50", {}, 2},
      {"fusion.freeze", Kind::boolean, "false"},
      {"nmt.arch", Kind::choice, "rnn", {"rnn", "transformer"}},
      {"nmt.emb_dim", Kind::integer, "64", {}, 1},
      {"nmt.hidden", Kind::integer, "64", {}, 1},
      {"nmt.layers", Kind::integer, "2", {}, 1},
      {"nmt.heads", Kind::integer, "8", {}, 1},
      {"nmt.ffn", Kind::integer, "256", {}, 1},
      {"nmt.tie_output", Kind::boolean, "true"},
      {"nmt.batch_size", Kind::integer, "32", {}, 1},
      {"nmt.token_batch", Kind::integer, "4096", {}, 1},
      {"nmt.optimizer", Kind::choice, "sgd", {"sgd", "adam"}},
      {"nmt.lr", Kind::real, "0.0002"},
      {"nmt.schedule", Kind::choice, "constant", {"constant", "inverse_sqrt"}},
      {"nmt.warmup", Kind::integer, "8000", {}, 1},
      {"nmt.dropout", Kind::real, "0.3"},
      {"nmt.max_len", Kind::integer, "80", {}, 1},
      {"nmt.epochs", Kind::integer, "10", {}, 0},
      {"nmt.seed", Kind::uint64, "1"},
      {"nmt.clip_norm", Kind::real, "5"},
      {"decode.beam", Kind::integer, "5", {}, 1},
      {"decode.max_len", Kind::integer, "100", {}, 1},
  };
  return s;
}

// Defaults that change with nmt.arch = transformer.
const KeyValues& transformer_defaults() {
  static const KeyValues d = {{"nmt.optimizer", "adam"},
                              {"nmt.lr", "2"},
                              {"nmt.schedule", "inverse_sqrt"},
                              {"nmt.dropout", "0.1"}};
  return d;
}

bool parse_long(const std::string& v, long& out) {
  try {
    std::size_t pos = 0;
    out = std::stol(v, &pos);
    return pos == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
  if (v.empty() || v[0] == '-') return false;
  try {
    std::size_t pos = 0;
    out = std::stoull(v, &pos);
    return pos == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_real(const std::string& v, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> errors)
    : ConfigError(summarize(errors)), errors_(std::move(errors)) {}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
    } else {
      std::string key = trim(std::string_view(t).substr(0, eq));
      std::string value = trim(std::string_view(t).substr(eq + 1));
      if (key.empty()) {
        errors.push_back("line " + std::to_string(line_no) + ": empty key");
      } else if (kv.contains(key)) {
        errors.push_back(key + ": duplicate key (line " + std::to_string(line_no) + ")");
      } else {
        kv.emplace(std::move(key), std::move(value));
      }
    }
    if (end == text.size()) break;
  }
  if (!errors.empty()) throw ConfigErrors(std::move(errors));
  return kv;
}

KeyValues read_key_values(const std::string& path) { return parse_key_values(read_file(path)); }

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::baseline: return "baseline";
    case Strategy::el_kge: return "el_kge";
    case Strategy::sem_kge: return "sem_kge";
  }
  return "baseline";
}

std::string_view to_string(Tokenization t) { return t == Tokenization::word ? "word" : "bpe"; }

const KeyValues& default_values() {
  static const KeyValues d = [] {
    KeyValues out;
    for (const auto& s : schema()) out[s.key] = s.fallback;
    return out;
  }();
  return d;
}

KeyValues PipelineConfig::echo() const {
  KeyValues kv;
  kv["kb.source"] = kb_source;
  kv["kb.target"] = kb_target;
  kv["corpus.train.source"] = train_source;
  kv["corpus.train.target"] = train_target;
  kv["corpus.test.source"] = test_source;
  kv["corpus.test.target"] = test_target;
  kv["corpus.test.entities"] = test_entities;
  kv["output_dir"] = output_dir;
  kv["strategy"] = to_string(strategy);
  kv["tokenization"] = to_string(tokenization);
  kv["unk"] = nmt::to_string(unk);
  kv["seed"] = std::to_string(seed);
  kv["deterministic"] = deterministic ? "true" : "false";
  kv["bpe.merges"] = std::to_string(bpe_merges);
  kv["bpe.min_frequency"] = std::to_string(bpe_min_frequency);
  kv["vocab.max_size"] = std::to_string(vocab_max_size);
  kv["vocab.extend"] = vocab_extend ? "true" : "false";
  kv["el.max_span"] = std::to_string(el_max_span);
  kv["el.source_prefix"] = el_source_prefix;
  kv["el.target_prefix"] = el_target_prefix;
  kv["kge.dim"] = std::to_string(kge.dim);
  kv["kge.epochs"] = std::to_string(kge.epochs);
  kv["kge.lr"] = format_real(kge.lr);
  kv["kge.minn"] = std::to_string(kge.min_subword);
  kv["kge.maxn"] = std::to_string(kge.max_subword);
  kv["kge.buckets"] = std::to_string(kge.bucket_count);
  kv["kge.threads"] = std::to_string(kge.threads);
  kv["kge.seed"] = std::to_string(kge.seed);
  kv["kge.mode"] = kb::to_string(kge.mode);
  kv["kge.max_bag"] = std::to_string(kge_max_bag);
  kv["fusion.freeze"] = fusion_freeze ? "true" : "false";
  for (auto& [k, v] : nmt::to_kv(model)) kv[k] = v;
  for (auto& [k, v] : nmt::to_kv(train)) kv[k] = v;
  kv["decode.beam"] = std::to_string(beam);
  kv["decode.max_len"] = std::to_string(max_output_len);
  return kv;
}

PipelineConfig validate_config(const KeyValues& input) {
  std::vector<std::string> errors;
  std::map<std::string, const KeySpec*> specs;
  for (const auto& s : schema()) specs[s.key] = &s;

  for (const auto& [k, v] : input) {
    if (!specs.contains(k)) errors.push_back(k + ": unknown key");
  }

  KeyValues kv = default_values();
  auto arch_it = input.find("nmt.arch");
  if (arch_it != input.end() && arch_it->second == "transformer") {
    for (const auto& [k, v] : transformer_defaults()) kv[k] = v;
  }
  for (const auto& [k, v] : input) {
    if (specs.contains(k)) kv[k] = v;
  }

  // Type checks; values that fail are reported and replaced by defaults so
  // that later invariant checks still run.
  for (const auto& s : schema()) {
    std::string& v = kv[s.key];
    const bool given = input.contains(s.key);
    auto bad = [&](const std::string& why) {
      errors.push_back(std::string(s.key) + ": " + why);
      v = s.fallback;
    };
    switch (s.kind) {
      case Kind::path:
        if (v.empty()) {
          errors.push_back(std::string(s.key) + ": required");
        } else if (!std::filesystem::is_regular_file(v)) {
          errors.push_back(std::string(s.key) + ": file not found: " + v);
        }
        break;
      case Kind::opt_path:
        if (!v.empty() && !std::filesystem::is_regular_file(v)) {
          errors.push_back(std::string(s.key) + ": file not found: " + v);
        }
        break;
      case Kind::dir:
        if (v.empty()) errors.push_back(std::string(s.key) + ": required");
        break;
      case Kind::text:
        break;
      case Kind::integer: {
        long x = 0;
        if (!parse_long(v, x)) {
          bad("expected an integer, got '" + v + "'");
        } else if (x < s.min) {
          bad("must be >= " + std::to_string(s.min) + ", got " + v);
        }
        break;
      }
      case Kind::uint64: {
        std::uint64_t x = 0;
        if (!parse_u64(v, x)) bad("expected a non-negative integer, got '" + v + "'");
        break;
      }
      case Kind::real: {
        double x = 0;
        if (!parse_real(v, x)) bad("expected a number, got '" + v + "'");
        break;
      }
      case Kind::boolean:
        if (v != "true" && v != "false") bad("expected true|false, got '" + v + "'");
        break;
      case Kind::choice: {
        bool ok = false;
        for (const auto& c : s.choices) ok = ok || c == v;
        if (!ok) {
          std::string opts;
          for (const auto& c : s.choices) opts += (opts.empty() ? "" : "|") + c;
          bad("expected one of " + opts + ", got '" + v + "'");
        }
        break;
      }
    }
    (void)given;
  }

  PipelineConfig c;
  c.kb_source = kv["kb.source"];
  c.kb_target = kv["kb.target"];
  c.train_source = kv["corpus.train.source"];
  c.train_target = kv["corpus.train.target"];
  c.test_source = kv["corpus.test.source"];
  c.test_target = kv["corpus.test.target"];
  c.test_entities = kv["corpus.test.entities"];
  c.output_dir = kv["output_dir"];
  c.strategy = kv["strategy"] == "el_kge"    ? Strategy::el_kge
               : kv["strategy"] == "sem_kge" ? Strategy::sem_kge
                                             : Strategy::baseline;
  c.tokenization = kv["tokenization"] == "bpe" ? Tokenization::bpe : Tokenization::word;
  c.unk = nmt::parse_unk_mode(kv["unk"]);
  c.seed = std::stoull(kv["seed"]);
  c.deterministic = kv["deterministic"] == "true";
  if (const char* env = std::getenv("KGNMT_DETERMINISTIC")) {
    if (std::string_view(env) == "1") c.deterministic = true;
    if (std::string_view(env) == "0") c.deterministic = false;
  }
  c.bpe_merges = std::stoi(kv["bpe.merges"]);
  c.bpe_min_frequency = std::stoi(kv["bpe.min_frequency"]);
  c.vocab_max_size = std::stoi(kv["vocab.max_size"]);
  c.vocab_extend = kv["vocab.extend"] == "true";
  c.el_max_span = std::stoi(kv["el.max_span"]);
  c.el_source_prefix = kv["el.source_prefix"];
  c.el_target_prefix = kv["el.target_prefix"];
  c.kge.dim = std::stoi(kv["kge.dim"]);
  c.kge.epochs = std::stoi(kv["kge.epochs"]);
  c.kge.lr = std::stod(kv["kge.lr"]);
  c.kge.min_subword = std::stoi(kv["kge.minn"]);
  c.kge.max_subword = std::stoi(kv["kge.maxn"]);
  c.kge.bucket_count = static_cast<std::uint32_t>(std::stoul(kv["kge.buckets"]));
  c.kge.threads = std::stoi(kv["kge.threads"]);
  c.kge.seed = std::stoull(kv["kge.seed"]);
  c.kge.mode = c.strategy == Strategy::sem_kge ? kge::KgeMode::semantic : kge::KgeMode::structure;
  if (c.deterministic) c.kge.threads = 1;
  c.kge_max_bag = std::stoi(kv["kge.max_bag"]);
  c.fusion_freeze = kv["fusion.freeze"] == "true";
  c.model = nmt::model_config_from(kv);
  c.train = nmt::train_config_from(kv);
  c.beam = std::stoi(kv["decode.beam"]);
  c.max_output_len = std::stoi(kv["decode.max_len"]);

  // Invariants.
  if (c.strategy == Strategy::el_kge && c.tokenization == Tokenization::bpe) {
    errors.push_back(
        "tokenization: bpe cannot be combined with strategy el_kge; structure-based KG "
        "embeddings only cover word-level tokens");
  }
  if (c.strategy != Strategy::baseline) {
    const std::string why = "required for strategy " + std::string(to_string(c.strategy));
    if (c.kb_source.empty()) errors.push_back("kb.source: " + why);
    if (c.kb_target.empty()) errors.push_back("kb.target: " + why);
  } else if (c.unk == nmt::UnkMode::lexicon_then_copy &&
             (c.kb_source.empty() || c.kb_target.empty())) {
    errors.push_back("unk: lexicon_then_copy needs kb.source and kb.target");
  }
  if (c.strategy == Strategy::sem_kge && c.kge.dim != c.model.emb_dim) {
    errors.push_back("kge.dim: must equal nmt.emb_dim (" + std::to_string(c.model.emb_dim) +
                     ") for strategy sem_kge, got " + std::to_string(c.kge.dim));
  }
  if (c.kge.min_subword > c.kge.max_subword) {
    errors.push_back("kge.minn: must not exceed kge.maxn");
  }
  if (c.strategy == Strategy::sem_kge && (c.kge.bucket_count & (c.kge.bucket_count - 1)) != 0) {
    errors.push_back("kge.buckets: must be a power of two");
  }
  if (c.model.arch == nmt::Architecture::transformer && c.model.hidden % c.model.heads != 0) {
    errors.push_back("nmt.hidden: model dimension " + std::to_string(c.model.hidden) +
                     " is not divisible by nmt.heads " + std::to_string(c.model.heads));
  }
  if (!(c.train.lr > 0)) errors.push_back("nmt.lr: must be positive");
  if (c.train.dropout < 0 || c.train.dropout >= 1) errors.push_back("nmt.dropout: must be in [0, 1)");
  if (!(c.train.clip_norm > 0)) errors.push_back("nmt.clip_norm: must be positive");
  if (!(c.kge.lr > 0)) errors.push_back("kge.lr: must be positive");

  if (!errors.empty()) throw ConfigErrors(std::move(errors));
  return c;
}

PipelineConfig load_config(const std::string& path) {
  return validate_config(read_key_values(path));
}

}  // namespace kgnmt::pipeline
