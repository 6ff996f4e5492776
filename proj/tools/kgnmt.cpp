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

// Command-line front end: one subcommand per pipeline stage plus
// "pipeline run" for the whole flow.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/el/linker.hpp"
#include "kgnmt/eval/metrics.hpp"
#include "kgnmt/fusion/fuse.hpp"
#include "kgnmt/kb/label_index.hpp"
#include "kgnmt/kb/lexicon.hpp"
#include "kgnmt/kb/ntriples.hpp"
#include "kgnmt/kb/records.hpp"
#include "kgnmt/kge/model.hpp"
#include "kgnmt/nmt/checkpoint.hpp"
#include "kgnmt/nmt/train.hpp"
#include "kgnmt/pipeline/config.hpp"
#include "kgnmt/pipeline/run.hpp"
#include "kgnmt/pipeline/synthetic.hpp"
#include "kgnmt/tok/bpe.hpp"
#include "kgnmt/tok/vocab.hpp"
#include "kgnmt/version.hpp"

using namespace kgnmt;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return in;
}

tok::Vocabulary load_vocab(const std::string& path) {
  auto in = open_in(path);
  return tok::read_vocab(in);
}

// Optional key-value file plus repeated --set key=value overrides.
pipeline::KeyValues gather(const std::string& file, const std::vector<std::string>& sets) {
  pipeline::KeyValues kv;
  if (!file.empty()) kv = pipeline::read_key_values(file);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

struct Args {
  // shared
  std::string in, out, config;
  std::vector<std::string> inputs, sets;
  // kb
  std::string kb, kb_target, mode = "structure", src_prefix = "dbr_", tgt_prefix = "dbr_de_";
  std::string skips;
  int max_bag = 50;
  // kge
  std::string records, emb, token;
  int k = 10;
  // el
  std::string prefix = "dbr_", stats;
  int max_span = 5;
  // bpe / vocab
  std::string merges;
  int num_merges = 32000, min_frequency = 2, max_size = 50000;
  std::string strategy = "baseline";
  // fuse
  std::string vocab, kge;
  int dim = 64;
  std::uint64_t seed = 1;
  // nmt
  std::string src, tgt, src_vocab, tgt_vocab, src_emb, tgt_emb, model;
  std::string unk = "off", kb_source;
  int beam = 5, max_len = 100;
  bool freeze = false, debpe = false, keep_annotations = false;
  // eval
  std::string hyp, ref, entities;
  bool tsv = false;
  // synth
  pipeline::SyntheticOptions synth;
};

void kb_parse(const Args& a) {
  const auto kb = kb::parse_ntriples_file(a.in);
  std::cout << "triples " << kb.size() << "\nentities " << kb.entity_count() << "\nrelations "
            << kb.relation_count() << "\n";
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    kb::write_ntriples(out, kb);
  }
}

void kb_records(const Args& a) {
  const auto src = kb::parse_ntriples_file(a.kb);
  kb::RecordOptions opts;
  kb::TripleSet merged = src;
  if (!a.kb_target.empty()) {
    const auto tgt = kb::parse_ntriples_file(a.kb_target);
    merged = kb::merge(src, tgt);
    opts.namer = kb::linked_data_namer(tgt, a.src_prefix, a.tgt_prefix);
  }
  const auto recs = kb::triples_to_records(merged, kb::parse_kge_mode(a.mode),
                                           static_cast<std::size_t>(a.max_bag), opts);
  for (const auto& w : recs.warnings) std::cerr << "warning: " << w << "\n";
  auto out = open_out(a.out);
  kb::write_records(out, recs);
  std::cout << "records " << recs.size() << "\n";
}

void kb_lexicon(const Args& a) {
  const auto res = kb::extract_bilingual_lexicon(kb::parse_ntriples_file(a.kb),
                                                 kb::parse_ntriples_file(a.kb_target));
  auto out = open_out(a.out);
  kb::write_lexicon(out, res.lexicon);
  if (!a.skips.empty()) {
    auto s = open_out(a.skips);
    kb::write_skip_report(s, res.skipped);
  }
  std::cout << "entries " << res.lexicon.size() << "\nskipped " << res.skipped.size() << "\n";
}

void kge_train(const Args& a) {
  auto kv = gather(a.config, a.sets);
  kge::KgeConfig cfg = kge::kge_config_from(kv);
  cfg.mode = kb::parse_kge_mode(a.mode);
  if (kv.contains("kge.mode")) cfg.mode = kb::parse_kge_mode(kv.at("kge.mode"));
  cfg.validate();
  auto in = open_in(a.records);
  const auto recs = kb::read_records(in);
  auto model = kge::train_kge(recs, cfg);
  const auto& losses = model.epoch_loss();
  for (std::size_t e = 0; e < losses.size(); ++e) {
    std::cout << "epoch " << e + 1 << " loss " << losses[e] << "\n";
  }
  kge::save_embedding(a.out, model.embedding());
}

void kge_nn(const Args& a) {
  const auto emb = kge::load_embedding(a.emb);
  for (const auto& [tok, sim] : kge::nearest_neighbors(emb, a.token, a.k)) {
    std::cout << tok << '\t' << sim << "\n";
  }
}

void el_annotate(const Args& a) {
  el::EntityLinker linker(kb::parse_ntriples_file(a.kb), a.prefix,
                          static_cast<std::size_t>(a.max_span));
  el::AnnotationStats stats;
  std::vector<Sentence> out;
  for (const auto& s : read_corpus(a.in)) out.push_back(linker.annotate(s, &stats));
  write_corpus(a.out, out);
  if (!a.stats.empty()) {
    auto s = open_out(a.stats);
    el::write_stats(s, stats);
  }
  el::write_stats(std::cout, stats);
}

void bpe_learn(const Args& a) {
  std::vector<Sentence> corpus;
  for (const auto& f : a.inputs) {
    auto c = read_corpus(f);
    corpus.insert(corpus.end(), c.begin(), c.end());
  }
  const auto merges = tok::learn_bpe(std::span<const Sentence>(corpus), a.num_merges,
                                     tok::annotation_tokens(), a.min_frequency);
  auto out = open_out(a.out);
  tok::write_merges(out, merges);
  std::cout << "merges " << merges.size() << "\n";
}

void bpe_apply(const Args& a) {
  auto in = open_in(a.merges);
  tok::BpeEncoder enc(tok::read_merges(in));
  std::vector<Sentence> out;
  for (const auto& s : read_corpus(a.in)) out.push_back(enc.apply(s));
  write_corpus(a.out, out);
}

void bpe_join(const Args& a) {
  std::vector<Sentence> out;
  for (const auto& s : read_corpus(a.in)) out.push_back(tok::debpe(s));
  write_corpus(a.out, out);
}

void vocab_build(const Args& a) {
  std::vector<Sentence> corpus;
  for (const auto& f : a.inputs) {
    auto c = read_corpus(f);
    corpus.insert(corpus.end(), c.begin(), c.end());
  }
  auto v = tok::build_vocab(corpus, static_cast<std::size_t>(a.max_size));
  if (!a.kb.empty()) {
    std::vector<std::string> extra;
    for (const auto& [iri, labels] : kb::entity_labels(kb::parse_ntriples_file(a.kb))) {
      for (const auto& l : labels) {
        const auto words = split_ws(l);
        if (words.empty()) continue;
        if (a.strategy == "el_kge") {
          extra.push_back(el::make_annotation(words, kb::uri_token(iri, a.prefix)));
        } else {
          extra.insert(extra.end(), words.begin(), words.end());
        }
      }
    }
    v = v.extended(extra);
  }
  auto out = open_out(a.out);
  tok::write_vocab(out, v);
  std::cout << "size " << v.size() << "\n";
}

void fuse_concat(const Args& a) {
  const auto nmt_emb = fusion::read_embeddings_file(a.emb);
  const auto fused = fusion::fuse_concat(nmt_emb, kge::load_embedding(a.kge), load_vocab(a.vocab));
  fusion::write_embeddings_file(a.out, fusion::to_table(fused, load_vocab(a.vocab)));
  fusion::write_coverage(std::cout, fused.coverage);
}

void fuse_init(const Args& a) {
  std::mt19937_64 rng(a.seed);
  const auto vocab = load_vocab(a.vocab);
  const auto fused = fusion::fuse_init(kge::load_embedding(a.kge), vocab, a.dim, rng);
  fusion::write_embeddings_file(a.out, fusion::to_table(fused, vocab));
  fusion::write_coverage(std::cout, fused.coverage);
}

// Copies a vocabulary-aligned embedding file into an embedding parameter.
void load_into(nmt::Parameter<float>& p, const std::string& path, const tok::Vocabulary& vocab) {
  const auto table = fusion::read_embeddings_file(path);
  if (table.dim() != p.value.rows()) {
    throw ConfigError(path + ": embedding dimension " + std::to_string(table.dim()) +
                      " does not match model emb_dim " + std::to_string(p.value.rows()));
  }
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const int row = table.index(vocab.token(static_cast<int>(i)));
    if (row >= 0) p.value.col(static_cast<Eigen::Index>(i)) = table.vector(row);
  }
}

void nmt_train(const Args& a) {
  const auto kv = gather(a.config, a.sets);
  nmt::ModelConfig mc = nmt::model_config_from(kv);
  nmt::TrainConfig tc = nmt::train_config_from(
      kv, mc.arch == nmt::Architecture::transformer ? nmt::TrainConfig::transformer_defaults()
                                                    : nmt::TrainConfig::rnn_defaults());
  mc.validate();
  tc.validate();
  const auto sv = load_vocab(a.src_vocab);
  const auto tv = load_vocab(a.tgt_vocab);
  const auto src = read_corpus(a.src);
  const auto tgt = read_corpus(a.tgt);
  if (src.size() != tgt.size()) throw Error("source and target differ in length");
  std::vector<nmt::Example> examples;
  for (std::size_t i = 0; i < src.size(); ++i) {
    examples.push_back({tok::numericalize(src[i], sv), tok::numericalize(tgt[i], tv)});
  }
  auto model = nmt::make_model<float>(mc, static_cast<int>(sv.size()), static_cast<int>(tv.size()));
  std::mt19937_64 rng(a.seed);
  model->initialize(rng);
  if (!a.src_emb.empty()) load_into(model->src_embedding(), a.src_emb, sv);
  if (!a.tgt_emb.empty()) load_into(model->tgt_embedding(), a.tgt_emb, tv);
  nmt::train<float>(*model, examples, tc, [](int epoch, double loss) {
    std::cout << "epoch " << epoch << " loss " << loss << std::endl;
  });
  nmt::save_checkpoint<float>(a.out, *model, sv.hash(), tv.hash());
}

void nmt_translate(const Args& a) {
  auto ckpt = nmt::load_checkpoint<float>(a.model);
  const auto sv = load_vocab(a.src_vocab);
  const auto tv = load_vocab(a.tgt_vocab);
  if (sv.hash() != ckpt.info.src_vocab_hash || tv.hash() != ckpt.info.tgt_vocab_hash) {
    throw ConfigError("vocabulary files do not match the checkpoint");
  }
  kb::BilingualLexicon lexicon;
  const bool have_lex = !a.kb_source.empty() && !a.kb_target.empty();
  if (have_lex) {
    lexicon = kb::extract_bilingual_lexicon(kb::parse_ntriples_file(a.kb_source),
                                            kb::parse_ntriples_file(a.kb_target))
                  .lexicon;
  }
  pipeline::TranslateOptions opts;
  opts.beam = a.beam;
  opts.max_len = a.max_len;
  opts.unk = nmt::parse_unk_mode(a.unk);
  opts.lexicon = have_lex ? &lexicon : nullptr;
  opts.strip_annotations = !a.keep_annotations;
  opts.debpe = a.debpe;
  write_corpus(a.out, pipeline::translate(*ckpt.model, sv, tv, read_corpus(a.in), opts));
}

void eval_cmd(const Args& a) {
  const auto hyps = read_corpus(a.hyp);
  const auto refs = read_corpus(a.ref);
  std::vector<eval::EntityTest> tests;
  if (!a.entities.empty()) tests = eval::read_entity_tests(a.entities);
  const auto report = eval::evaluate(hyps, refs, tests);
  if (a.tsv) {
    eval::write_report_tsv(std::cout, report);
  } else {
    eval::write_report(std::cout, report);
  }
}

void pipeline_run(const Args& a) {
  const auto cfg = pipeline::validate_config(gather(a.config, a.sets));
  const auto res = pipeline::run_pipeline(cfg, &std::cerr);
  std::cout << res.run_dir << "\n";
  eval::write_report(std::cout, res.report);
}

void pipeline_validate(const Args& a) {
  const auto cfg = pipeline::validate_config(gather(a.config, a.sets));
  for (const auto& [k, v] : cfg.echo()) std::cout << k << " = " << v << "\n";
}

void synth_generate(const Args& a) {
  pipeline::write_synthetic(a.out, pipeline::generate_synthetic(a.synth));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph augmented neural machine translation toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Args a;
  std::function<void()> action;
  auto bind = [&](CLI::App* cmd, void (*fn)(const Args&)) {
    cmd->callback([&action, &a, fn] { action = [&a, fn] { fn(a); }; });
  };
  auto config_opts = [&](CLI::App* cmd) {
    cmd->add_option("--config", a.config, "key-value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", a.sets, "override: key=value (repeatable)");
  };

  auto kb = app.add_subcommand("kb", "knowledge base ingestion")->require_subcommand(1);
  auto kb_p = kb->add_subcommand("parse", "parse N-Triples and print statistics");
  kb_p->add_option("input", a.in)->required()->check(CLI::ExistingFile);
  kb_p->add_option("--out", a.out, "write canonical N-Triples");
  bind(kb_p, kb_parse);
  auto kb_r = kb->add_subcommand("records", "convert triples to KGE training records");
  kb_r->add_option("--kb", a.kb)->required()->check(CLI::ExistingFile);
  kb_r->add_option("--kb-target", a.kb_target, "second KB, merged with target naming")
      ->check(CLI::ExistingFile);
  kb_r->add_option("--mode", a.mode)->check(CLI::IsMember({"structure", "semantic"}));
  kb_r->add_option("--max-bag", a.max_bag);
  kb_r->add_option("--source-prefix", a.src_prefix);
  kb_r->add_option("--target-prefix", a.tgt_prefix);
  kb_r->add_option("--out", a.out)->required();
  bind(kb_r, kb_records);
  auto kb_l = kb->add_subcommand("lexicon", "bilingual lexicon from sameAs links");
  kb_l->add_option("--kb", a.kb)->required()->check(CLI::ExistingFile);
  kb_l->add_option("--kb-target", a.kb_target)->required()->check(CLI::ExistingFile);
  kb_l->add_option("--out", a.out)->required();
  kb_l->add_option("--skips", a.skips, "skip report");
  bind(kb_l, kb_lexicon);

  auto kge = app.add_subcommand("kge", "knowledge graph embeddings")->require_subcommand(1);
  auto kge_t = kge->add_subcommand("train", "train embeddings on a record file");
  kge_t->add_option("--records", a.records)->required()->check(CLI::ExistingFile);
  kge_t->add_option("--mode", a.mode)->check(CLI::IsMember({"structure", "semantic"}));
  kge_t->add_option("--out", a.out)->required();
  config_opts(kge_t);
  bind(kge_t, kge_train);
  auto kge_n = kge->add_subcommand("nn", "nearest neighbours by cosine");
  kge_n->add_option("--emb", a.emb)->required()->check(CLI::ExistingFile);
  kge_n->add_option("--token", a.token)->required();
  kge_n->add_option("-k", a.k);
  bind(kge_n, kge_nn);

  auto el = app.add_subcommand("el", "entity linking")->require_subcommand(1);
  auto el_a = el->add_subcommand("annotate", "annotate a tokenized corpus");
  el_a->add_option("--kb", a.kb)->required()->check(CLI::ExistingFile);
  el_a->add_option("--prefix", a.prefix);
  el_a->add_option("--max-span", a.max_span);
  el_a->add_option("--in", a.in)->required()->check(CLI::ExistingFile);
  el_a->add_option("--out", a.out)->required();
  el_a->add_option("--stats", a.stats);
  bind(el_a, el_annotate);

  auto bpe = app.add_subcommand("bpe", "byte-pair encoding")->require_subcommand(1);
  auto bpe_l = bpe->add_subcommand("learn", "learn merges from corpora");
  bpe_l->add_option("--in", a.inputs)->required()->check(CLI::ExistingFile);
  bpe_l->add_option("--merges", a.num_merges);
  bpe_l->add_option("--min-frequency", a.min_frequency);
  bpe_l->add_option("--out", a.out)->required();
  bind(bpe_l, bpe_learn);
  auto bpe_a = bpe->add_subcommand("apply", "segment a corpus");
  bpe_a->add_option("--merges", a.merges)->required()->check(CLI::ExistingFile);
  bpe_a->add_option("--in", a.in)->required()->check(CLI::ExistingFile);
  bpe_a->add_option("--out", a.out)->required();
  bind(bpe_a, bpe_apply);
  auto bpe_j = bpe->add_subcommand("join", "undo segmentation");
  bpe_j->add_option("--in", a.in)->required()->check(CLI::ExistingFile);
  bpe_j->add_option("--out", a.out)->required();
  bind(bpe_j, bpe_join);

  auto voc = app.add_subcommand("vocab", "vocabularies")->require_subcommand(1);
  auto voc_b = voc->add_subcommand("build", "frequency-ranked vocabulary");
  voc_b->add_option("--in", a.inputs)->required()->check(CLI::ExistingFile);
  voc_b->add_option("--max-size", a.max_size);
  voc_b->add_option("--extend-kb", a.kb, "add the KB's lexicalizations")
      ->check(CLI::ExistingFile);
  voc_b->add_option("--strategy", a.strategy)
      ->check(CLI::IsMember({"baseline", "el_kge", "sem_kge"}));
  voc_b->add_option("--prefix", a.prefix);
  voc_b->add_option("--out", a.out)->required();
  bind(voc_b, vocab_build);

  auto fuse = app.add_subcommand("fuse", "embedding fusion")->require_subcommand(1);
  auto fuse_c = fuse->add_subcommand("concat", "concatenate NMT and KG embeddings");
  fuse_c->add_option("--nmt-emb", a.emb)->required()->check(CLI::ExistingFile);
  fuse_c->add_option("--kge", a.kge)->required()->check(CLI::ExistingFile);
  fuse_c->add_option("--vocab", a.vocab)->required()->check(CLI::ExistingFile);
  fuse_c->add_option("--out", a.out)->required();
  bind(fuse_c, fuse_concat);
  auto fuse_i = fuse->add_subcommand("init", "initialize embeddings from KG vectors");
  fuse_i->add_option("--kge", a.kge)->required()->check(CLI::ExistingFile);
  fuse_i->add_option("--vocab", a.vocab)->required()->check(CLI::ExistingFile);
  fuse_i->add_option("--dim", a.dim);
  fuse_i->add_option("--seed", a.seed);
  fuse_i->add_option("--out", a.out)->required();
  bind(fuse_i, fuse_init);

  auto nmt = app.add_subcommand("nmt", "translation model")->require_subcommand(1);
  auto nmt_t = nmt->add_subcommand("train", "train a model");
  nmt_t->add_option("--src", a.src)->required()->check(CLI::ExistingFile);
  nmt_t->add_option("--tgt", a.tgt)->required()->check(CLI::ExistingFile);
  nmt_t->add_option("--src-vocab", a.src_vocab)->required()->check(CLI::ExistingFile);
  nmt_t->add_option("--tgt-vocab", a.tgt_vocab)->required()->check(CLI::ExistingFile);
  nmt_t->add_option("--src-emb", a.src_emb, "initial source embeddings")->check(CLI::ExistingFile);
  nmt_t->add_option("--tgt-emb", a.tgt_emb, "initial target embeddings")->check(CLI::ExistingFile);
  nmt_t->add_option("--seed", a.seed, "initialization seed");
  nmt_t->add_option("--out", a.out)->required();
  config_opts(nmt_t);
  bind(nmt_t, nmt_train);
  auto nmt_x = nmt->add_subcommand("translate", "beam-search decoding");
  nmt_x->add_option("--model", a.model)->required()->check(CLI::ExistingFile);
  nmt_x->add_option("--src-vocab", a.src_vocab)->required()->check(CLI::ExistingFile);
  nmt_x->add_option("--tgt-vocab", a.tgt_vocab)->required()->check(CLI::ExistingFile);
  nmt_x->add_option("--in", a.in)->required()->check(CLI::ExistingFile);
  nmt_x->add_option("--out", a.out)->required();
  nmt_x->add_option("--beam", a.beam)->check(CLI::PositiveNumber);
  nmt_x->add_option("--max-len", a.max_len)->check(CLI::PositiveNumber);
  nmt_x->add_option("--unk", a.unk)->check(CLI::IsMember({"off", "copy", "copy_only",
                                                          "lexicon_then_copy"}));
  nmt_x->add_option("--kb-source", a.kb_source)->check(CLI::ExistingFile);
  nmt_x->add_option("--kb-target", a.kb_target)->check(CLI::ExistingFile);
  nmt_x->add_flag("--debpe", a.debpe, "join BPE segments");
  nmt_x->add_flag("--keep-annotations", a.keep_annotations);
  bind(nmt_x, nmt_translate);

  auto ev = app.add_subcommand("eval", "BLEU, chrF3, OOV and entity accuracy");
  ev->add_option("--hyp", a.hyp)->required()->check(CLI::ExistingFile);
  ev->add_option("--ref", a.ref)->required()->check(CLI::ExistingFile);
  ev->add_option("--entities", a.entities)->check(CLI::ExistingFile);
  ev->add_flag("--tsv", a.tsv);
  bind(ev, eval_cmd);

  auto pipe = app.add_subcommand("pipeline", "end-to-end runs")->require_subcommand(1);
  auto pipe_r = pipe->add_subcommand("run", "run every stage of a configuration");
  config_opts(pipe_r);
  bind(pipe_r, pipeline_run);
  auto pipe_v = pipe->add_subcommand("validate", "check a configuration and print it");
  config_opts(pipe_v);
  bind(pipe_v, pipeline_validate);

  auto syn = app.add_subcommand("synth", "synthetic data")->require_subcommand(1);
  auto syn_g = syn->add_subcommand("generate", "bilingual toy KB and corpus");
  syn_g->add_option("--out", a.out)->required();
  syn_g->add_option("--entities", a.synth.entities);
  syn_g->add_option("--held-out", a.synth.held_out);
  syn_g->add_option("--train", a.synth.train_pairs);
  syn_g->add_option("--test", a.synth.test_pairs);
  syn_g->add_option("--shared-names", a.synth.shared_names);
  syn_g->add_option("--seed", a.synth.seed);
  bind(syn_g, synth_generate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (action) action();
  } catch (const pipeline::ConfigErrors& e) {
    for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
