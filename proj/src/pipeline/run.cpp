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

#include "kgnmt/pipeline/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "kgnmt/el/linker.hpp"
#include "kgnmt/fusion/fuse.hpp"
#include "kgnmt/kb/label_index.hpp"
#include "kgnmt/kb/ntriples.hpp"
#include "kgnmt/kb/records.hpp"
#include "kgnmt/kge/model.hpp"
#include "kgnmt/nmt/beam.hpp"
#include "kgnmt/nmt/checkpoint.hpp"
#include "kgnmt/nmt/train.hpp"
#include "kgnmt/tok/bpe.hpp"
#include "kgnmt/version.hpp"

namespace kgnmt::pipeline {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::string ExperimentManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "kgnmt";
  j["version"] = version;
  j["status"] = status;
  if (!failed_stage.empty()) {
    j["failed_stage"] = failed_stage;
    j["error"] = error;
  }
  j["config"] = config;
  j["inputs"] = inputs;
  j["artifacts"] = artifacts;
  j["seeds"] = seeds;
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : stages) st.push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["stages"] = st;
  if (report) {
    nlohmann::json r;
    r["bleu"] = report->bleu;
    r["chrf3"] = report->chrf3;
    r["oov"] = report->oov;
    r["sentences"] = report->sentences;
    if (report->entities) {
      r["entity_correct"] = report->entities->correct;
      r["entity_total"] = report->entities->total;
      r["entity_accuracy"] = report->entities->fraction();
    }
    j["report"] = r;
  }
  return j.dump(2) + "\n";
}

std::vector<Sentence> translate(nmt::Seq2Seq<float>& model, const tok::Vocabulary& src_vocab,
                                const tok::Vocabulary& tgt_vocab,
                                std::span<const Sentence> sources, const TranslateOptions& opts) {
  std::vector<Sentence> out;
  out.reserve(sources.size());
  for (const auto& src : sources) {
    if (src.empty()) {
      out.emplace_back();
      continue;
    }
    auto session = model.start(tok::numericalize(src, src_vocab));
    auto hyps = nmt::beam_search(*session, opts.beam, opts.max_len);
    const auto& best = hyps.front();
    Sentence words = tok::denumericalize(best.tokens, tgt_vocab);
    words = nmt::unk_replace(words, best.attention, src, opts.lexicon, opts.unk);
    if (opts.strip_annotations) words = el::strip_annotations(words);
    if (opts.debpe) words = tok::debpe(words);
    out.push_back(std::move(words));
  }
  return out;
}

namespace {

std::string file_hash(const std::string& path) { return hex64(fnv1a64(read_file(path))); }

std::string fresh_run_dir(const std::string& output_dir) {
  fs::create_directories(output_dir);
  for (int n = 1; n < 100000; ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "run-%04d", n);
    const fs::path dir = fs::path(output_dir) / name;
    if (fs::create_directory(dir)) return dir.string();
  }
  throw Error("no free run directory under " + output_dir);
}

std::vector<Sentence> annotate_all(const el::EntityLinker& linker,
                                   const std::vector<Sentence>& corpus,
                                   el::AnnotationStats* stats) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(linker.annotate(s, stats));
  return out;
}

std::vector<Sentence> bpe_all(tok::BpeEncoder& enc, const std::vector<Sentence>& corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(enc.apply(s));
  return out;
}

// Tokens the KB lexicalizes, in the form the model sees them.
std::vector<std::string> kb_lexicalizations(const kb::TripleSet& kb, Strategy strategy,
                                            const std::string& prefix, tok::BpeEncoder* bpe) {
  std::vector<std::string> out;
  for (const auto& [iri, labels] : kb::entity_labels(kb)) {
    for (const auto& label : labels) {
      const Sentence words = split_ws(label);
      if (words.empty()) continue;
      if (strategy == Strategy::el_kge) {
        out.push_back(el::make_annotation(words, kb::uri_token(iri, prefix)));
      } else if (bpe) {
        for (auto& w : bpe->apply(words)) out.push_back(std::move(w));
      } else {
        for (const auto& w : words) out.push_back(w);
      }
    }
  }
  return out;
}

void freeze_rows(nmt::Parameter<float>& emb, const fusion::FusedEmbeddingMatrix& fused,
                 nmt::Parameter<float>* bias) {
  emb.mask.setOnes(emb.value.rows(), emb.value.cols());
  if (bias) bias->mask.setOnes(bias->value.rows(), bias->value.cols());
  for (std::size_t i = 0; i < fused.sources.size(); ++i) {
    if (fused.sources[i] != fusion::RowSource::kge_exact) continue;
    emb.mask.col(static_cast<Eigen::Index>(i)).setZero();
    if (bias) bias->mask(static_cast<Eigen::Index>(i), 0) = 0;
  }
}

class Runner {
 public:
  Runner(const PipelineConfig& c, std::ostream* log) : c_(c), log_(log) {
    dir_ = fresh_run_dir(c.output_dir);
    m_.config = c.echo();
    m_.version = kVersion;
    m_.seeds = {{"seed", std::to_string(c.seed)},
                {"kge.seed", std::to_string(c.kge.seed)},
                {"nmt.seed", std::to_string(c.train.seed)}};
    m_.status = "running";
  }

  RunResult run() {
    stage("load", [&] { load(); });
    if (c_.strategy == Strategy::el_kge) stage("annotate", [&] { annotate(); });
    if (c_.tokenization == Tokenization::bpe) stage("bpe", [&] { bpe(); });
    stage("vocab", [&] { vocab(); });
    if (c_.strategy != Strategy::baseline) stage("kge", [&] { kge(); });
    stage("model", [&] { build_model(); });
    stage("train", [&] { train(); });
    stage("checkpoint", [&] { checkpoint(); });
    stage("decode", [&] { decode(); });
    stage("eval", [&] { evaluate(); });
    m_.status = "completed";
    write_manifest();
    return {dir_, m_, report_};
  }

 private:
  void say(const std::string& line) {
    if (log_) *log_ << line << std::endl;
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  void record(const std::string& name) { m_.artifacts[name] = file_hash(path(name)); }

  void save_corpus(const std::string& name, const std::vector<Sentence>& corpus) {
    if (fs::exists(path(name))) throw Error("refusing to overwrite " + path(name));
    write_corpus(path(name), corpus);
    record(name);
  }

  template <typename F>
  void save_stream(const std::string& name, F&& fn) {
    if (fs::exists(path(name))) throw Error("refusing to overwrite " + path(name));
    {
      std::ofstream out(path(name), std::ios::binary);
      if (!out) throw Error("cannot write " + path(name));
      fn(out);
    }
    record(name);
  }

  void write_manifest() { write_file_atomic(path("manifest.json"), m_.to_json()); }

  void stage(const std::string& name, const std::function<void()>& fn) {
    say("[" + name + "]");
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const std::exception& e) {
      m_.stages.push_back({name, seconds_since(t0)});
      m_.status = "failed";
      m_.failed_stage = name;
      m_.error = e.what();
      write_manifest();
      throw PipelineError(name, dir_, e.what());
    }
    m_.stages.push_back({name, seconds_since(t0)});
  }

  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  void load() {
    const std::vector<std::pair<std::string, std::string>> inputs = {
        {"kb.source", c_.kb_source},
        {"kb.target", c_.kb_target},
        {"corpus.train.source", c_.train_source},
        {"corpus.train.target", c_.train_target},
        {"corpus.test.source", c_.test_source},
        {"corpus.test.target", c_.test_target},
        {"corpus.test.entities", c_.test_entities}};
    for (const auto& [key, p] : inputs) {
      if (!p.empty()) m_.inputs[key] = file_hash(p);
    }
    train_.source = read_corpus(c_.train_source);
    train_.target = read_corpus(c_.train_target);
    test_src_ = read_corpus(c_.test_source);
    test_ref_ = read_corpus(c_.test_target);
    if (train_.source.size() != train_.target.size()) {
      throw Error("training corpus sides differ in length");
    }
    if (test_src_.size() != test_ref_.size()) throw Error("test corpus sides differ in length");
    if (!c_.test_entities.empty()) entity_tests_ = eval::read_entity_tests(c_.test_entities);
    if (!c_.kb_source.empty()) kb_src_ = kb::parse_ntriples_file(c_.kb_source);
    if (!c_.kb_target.empty()) kb_tgt_ = kb::parse_ntriples_file(c_.kb_target);
    if (!c_.kb_source.empty() && !c_.kb_target.empty()) {
      auto lex = kb::extract_bilingual_lexicon(kb_src_, kb_tgt_);
      lexicon_ = std::move(lex.lexicon);
      have_lexicon_ = true;
    }
    say("  train pairs " + std::to_string(train_.source.size()) + ", test " +
        std::to_string(test_src_.size()));
  }

  void annotate() {
    el::EntityLinker src(kb_src_, c_.el_source_prefix, static_cast<std::size_t>(c_.el_max_span));
    el::EntityLinker tgt(kb_tgt_, c_.el_target_prefix, static_cast<std::size_t>(c_.el_max_span));
    el::AnnotationStats src_stats, tgt_stats, test_stats;
    train_.source = annotate_all(src, train_.source, &src_stats);
    train_.target = annotate_all(tgt, train_.target, &tgt_stats);
    test_src_ = annotate_all(src, test_src_, &test_stats);
    save_corpus("train.ann.src", train_.source);
    save_corpus("train.ann.tgt", train_.target);
    save_corpus("test.ann.src", test_src_);
    save_stream("annotation.stats", [&](std::ostream& out) {
      el::write_stats(out, src_stats, "train.source");
      el::write_stats(out, tgt_stats, "train.target");
      el::write_stats(out, test_stats, "test.source");
    });
  }

  void bpe() {
    std::vector<Sentence> joint = train_.source;
    joint.insert(joint.end(), train_.target.begin(), train_.target.end());
    merges_ = tok::learn_bpe(std::span<const Sentence>(joint), c_.bpe_merges,
                             tok::annotation_tokens(), c_.bpe_min_frequency);
    save_stream("merges.bpe", [&](std::ostream& out) { tok::write_merges(out, merges_); });
    encoder_.emplace(merges_);
    train_.source = bpe_all(*encoder_, train_.source);
    train_.target = bpe_all(*encoder_, train_.target);
    test_src_ = bpe_all(*encoder_, test_src_);
    save_corpus("train.bpe.src", train_.source);
    save_corpus("train.bpe.tgt", train_.target);
    save_corpus("test.bpe.src", test_src_);
  }

  void vocab() {
    const auto max = static_cast<std::size_t>(c_.vocab_max_size);
    src_vocab_ = tok::build_vocab(train_.source, max);
    tgt_vocab_ = tok::build_vocab(train_.target, max);
    if (c_.strategy != Strategy::baseline && c_.vocab_extend) {
      tok::BpeEncoder* enc = encoder_ ? &*encoder_ : nullptr;
      const auto src_extra = kb_lexicalizations(kb_src_, c_.strategy, c_.el_source_prefix, enc);
      const auto tgt_extra = kb_lexicalizations(kb_tgt_, c_.strategy, c_.el_target_prefix, enc);
      src_vocab_ = src_vocab_.extended(src_extra);
      tgt_vocab_ = tgt_vocab_.extended(tgt_extra);
    }
    save_stream("vocab.src", [&](std::ostream& out) { tok::write_vocab(out, src_vocab_); });
    save_stream("vocab.tgt", [&](std::ostream& out) { tok::write_vocab(out, tgt_vocab_); });
    say("  vocab src " + std::to_string(src_vocab_.size()) + ", tgt " +
        std::to_string(tgt_vocab_.size()));
  }

  void kge() {
    const kb::TripleSet merged = kb::merge(kb_src_, kb_tgt_);
    kb::RecordOptions opts;
    opts.namer = kb::linked_data_namer(kb_tgt_, c_.el_source_prefix, c_.el_target_prefix);
    const auto records = kb::triples_to_records(
        merged, c_.kge.mode, static_cast<std::size_t>(c_.kge_max_bag), opts);
    for (const auto& w : records.warnings) say("  warning: " + w);
    save_stream("kge.records", [&](std::ostream& out) { kb::write_records(out, records); });
    auto model = kge::train_kge(records, c_.kge);
    const auto& losses = model.epoch_loss();
    for (std::size_t e = 0; e < losses.size(); ++e) {
      say("  kge epoch " + std::to_string(e + 1) + " loss " + std::to_string(losses[e]));
    }
    embedding_ = model.embedding();
    kge::save_embedding(path("kge.vec"), embedding_);
    record("kge.vec");
    if (fs::exists(path("kge.vec.subwords"))) record("kge.vec.subwords");
  }

  void build_model() {
    nmt::ModelConfig mc = c_.model;
    if (c_.strategy == Strategy::el_kge) mc.emb_dim = c_.model.emb_dim + c_.kge.dim;
    model_ = nmt::make_model<float>(mc, static_cast<int>(src_vocab_.size()),
                                    static_cast<int>(tgt_vocab_.size()));
    std::mt19937_64 rng(c_.seed);
    model_->initialize(rng);
    if (c_.strategy == Strategy::baseline) return;

    fusion::FusedEmbeddingMatrix src, tgt;
    if (c_.strategy == Strategy::el_kge) {
      const auto src_base = fusion::random_embeddings(src_vocab_, c_.model.emb_dim, rng);
      const auto tgt_base = fusion::random_embeddings(tgt_vocab_, c_.model.emb_dim, rng);
      src = fusion::fuse_concat(src_base, embedding_, src_vocab_);
      tgt = fusion::fuse_concat(tgt_base, embedding_, tgt_vocab_);
    } else {
      src = fusion::fuse_init(embedding_, src_vocab_, c_.model.emb_dim, rng);
      tgt = fusion::fuse_init(embedding_, tgt_vocab_, c_.model.emb_dim, rng);
    }
    model_->src_embedding().value = src.matrix;
    model_->tgt_embedding().value = tgt.matrix;
    if (c_.fusion_freeze) {
      freeze_rows(model_->src_embedding(), src, nullptr);
      freeze_rows(model_->tgt_embedding(), tgt, model_->store().find("out.vocab_bias"));
    }
    fusion::write_embeddings_file(path("emb.src.vec"), fusion::to_table(src, src_vocab_));
    fusion::write_embeddings_file(path("emb.tgt.vec"), fusion::to_table(tgt, tgt_vocab_));
    record("emb.src.vec");
    record("emb.tgt.vec");
    save_stream("fusion.coverage", [&](std::ostream& out) {
      out << "[source]\n";
      fusion::write_coverage(out, src.coverage);
      out << "[target]\n";
      fusion::write_coverage(out, tgt.coverage);
    });
  }

  void train() {
    std::vector<nmt::Example> examples;
    examples.reserve(train_.source.size());
    for (std::size_t i = 0; i < train_.source.size(); ++i) {
      examples.push_back({tok::numericalize(train_.source[i], src_vocab_),
                          tok::numericalize(train_.target[i], tgt_vocab_)});
    }
    std::ostringstream log;
    auto stats = nmt::train<float>(*model_, examples, c_.train, [&](int epoch, double loss) {
      say("  epoch " + std::to_string(epoch) + " loss " + std::to_string(loss));
      log << epoch << '\t' << loss << '\n';
    });
    save_stream("train.log", [&](std::ostream& out) {
      out << log.str() << "updates\t" << stats.updates << "\nskipped\t" << stats.skipped << '\n';
    });
  }

  void checkpoint() {
    nmt::save_checkpoint<float>(path("model.ckpt"), *model_, src_vocab_.hash(),
                                tgt_vocab_.hash(),
                                {{"strategy", std::string(to_string(c_.strategy))},
                                 {"tokenization", std::string(to_string(c_.tokenization))}});
    record("model.ckpt");
  }

  void decode() {
    TranslateOptions opts;
    opts.beam = c_.beam;
    opts.max_len = c_.max_output_len;
    opts.unk = c_.unk;
    opts.lexicon = have_lexicon_ ? &lexicon_ : nullptr;
    opts.strip_annotations = true;
    opts.debpe = c_.tokenization == Tokenization::bpe;
    hyps_ = translate(*model_, src_vocab_, tgt_vocab_, test_src_, opts);
    save_corpus("translations.txt", hyps_);
  }

  void evaluate() {
    report_ = eval::evaluate(hyps_, test_ref_, entity_tests_);
    m_.report = report_;
    save_stream("report.txt", [&](std::ostream& out) { eval::write_report(out, report_); });
    save_stream("report.tsv", [&](std::ostream& out) { eval::write_report_tsv(out, report_); });
    std::ostringstream line;
    line << "  bleu " << report_.bleu << " chrf3 " << report_.chrf3 << " oov " << report_.oov;
    if (report_.entities) line << " entity_acc " << report_.entities->fraction();
    say(line.str());
  }

  const PipelineConfig& c_;
  std::ostream* log_;
  std::string dir_;
  ExperimentManifest m_;

  el::ParallelCorpus train_;
  std::vector<Sentence> test_src_;
  std::vector<Sentence> test_ref_;
  std::vector<eval::EntityTest> entity_tests_;
  kb::TripleSet kb_src_;
  kb::TripleSet kb_tgt_;
  kb::BilingualLexicon lexicon_;
  bool have_lexicon_ = false;
  tok::MergeTable merges_;
  std::optional<tok::BpeEncoder> encoder_;
  tok::Vocabulary src_vocab_;
  tok::Vocabulary tgt_vocab_;
  kge::KgEmbedding embedding_;
  std::unique_ptr<nmt::Seq2Seq<float>> model_;
  std::vector<Sentence> hyps_;
  eval::EvalReport report_;
};

}  // namespace

RunResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  Runner runner(config, log);
  return runner.run();
}

}  // namespace kgnmt::pipeline
