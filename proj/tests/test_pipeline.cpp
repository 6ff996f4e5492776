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

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/pipeline/config.hpp"
#include "kgnmt/pipeline/run.hpp"
#include "kgnmt/pipeline/synthetic.hpp"
#include "test_util.hpp"

using namespace kgnmt;
using namespace kgnmt::pipeline;
namespace fs = std::filesystem;

namespace {

// A small synthetic world on disk plus a tiny-model configuration for it.
struct Fixture {
  test::TempDir dir;
  Fixture() {
    SyntheticOptions o;
    o.entities = 40;
    o.held_out = 5;
    o.train_pairs = 60;
    o.test_pairs = 8;
    write_synthetic(dir.file("data"), generate_synthetic(o));
    fs::create_directories(dir.file("out"));
  }
  std::string data(const std::string& name) const { return dir.file("data") + "/" + name; }

  KeyValues config(const std::string& strategy, const std::string& out = "out") const {
    KeyValues kv{{"corpus.train.source", data("train.en")},
                 {"corpus.train.target", data("train.de")},
                 {"corpus.test.source", data("test.en")},
                 {"corpus.test.target", data("test.de")},
                 {"corpus.test.entities", data("test.entities")},
                 {"output_dir", dir.file(out)},
                 {"strategy", strategy},
                 {"nmt.emb_dim", "8"},
                 {"nmt.hidden", "8"},
                 {"nmt.layers", "1"},
                 {"nmt.epochs", "1"},
                 {"nmt.optimizer", "adam"},
                 {"nmt.lr", "0.01"},
                 {"decode.beam", "2"},
                 {"decode.max_len", "20"},
                 {"kge.dim", "8"},
                 {"kge.epochs", "2"},
                 {"kge.buckets", "1024"}};
    if (strategy != "baseline") {
      kv["kb.source"] = data("kb.en.nt");
      kv["kb.target"] = data("kb.de.nt");
    }
    return kv;
  }
};

std::size_t count_errors(const KeyValues& kv) {
  try {
    validate_config(kv);
  } catch (const ConfigErrors& e) {
    return e.errors().size();
  }
  return 0;
}

std::vector<std::string> errors_of(const KeyValues& kv) {
  try {
    validate_config(kv);
  } catch (const ConfigErrors& e) {
    return e.errors();
  }
  return {};
}

std::string write_config(const test::TempDir& dir, const std::string& name, const KeyValues& kv) {
  std::string text = "# generated\n\n";
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  return dir.write(name, text);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KGNMT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> files_in(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("key-value parsing") {
    const auto kv = parse_key_values("# c\n\na = 1\n b=two words \n");
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "two words");
    try {
      parse_key_values("a = 1\nnonsense\na = 2\n");
      FAIL("expected errors");
    } catch (const ConfigErrors& e) {
      REQUIRE(e.errors().size() == 2);
      CHECK(e.errors()[0].find("line 2") != std::string::npos);
      CHECK(e.errors()[1].starts_with("a: duplicate"));
    }
  }

  TEST_CASE("minimal config gets the documented defaults") {
    Fixture f;
    const KeyValues kv{{"corpus.train.source", f.data("train.en")},
                       {"corpus.train.target", f.data("train.de")},
                       {"corpus.test.source", f.data("test.en")},
                       {"corpus.test.target", f.data("test.de")},
                       {"output_dir", f.dir.file("out")}};
    const auto c = validate_config(kv);
    CHECK(c.strategy == Strategy::baseline);
    CHECK(c.tokenization == Tokenization::word);
    CHECK(c.train.optimizer == nmt::OptimizerKind::sgd);
    CHECK(c.train.lr == doctest::Approx(0.0002));
    CHECK(c.train.batch_size == 32);
    CHECK(c.train.max_len == 80);
    CHECK(c.bpe_merges == 32000);
    CHECK(c.beam == 5);
    const auto echo = c.echo();
    for (const auto& [k, v] : default_values()) {
      if (kv.contains(k)) continue;
      CAPTURE(k);
      CHECK(echo.at(k) == v);
    }
  }

  TEST_CASE("transformer selects its own training defaults") {
    Fixture f;
    auto kv = f.config("baseline");
    for (const char* k : {"nmt.optimizer", "nmt.lr", "nmt.emb_dim", "nmt.hidden", "nmt.layers"}) {
      kv.erase(k);
    }
    kv["nmt.arch"] = "transformer";
    const auto c = validate_config(kv);
    CHECK(c.train.optimizer == nmt::OptimizerKind::adam);
    CHECK(c.train.schedule == nmt::Schedule::inverse_sqrt);
    CHECK(c.train.lr == doctest::Approx(2.0));
    CHECK(c.train.dropout == doctest::Approx(0.1));
  }

  TEST_CASE("missing KB path under sem_kge is one error naming the key") {
    Fixture f;
    auto kv = f.config("sem_kge");
    kv.erase("kb.source");
    const auto errs = errors_of(kv);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].starts_with("kb.source"));
  }

  TEST_CASE("independent errors are all reported") {
    Fixture f;
    auto kv = f.config("baseline");
    kv["nmt.lr"] = "fast";
    kv["colour"] = "blue";
    kv["corpus.test.source"] = f.data("missing.en");
    const auto errs = errors_of(kv);
    REQUIRE(errs.size() == 3);
    CHECK(count_errors(f.config("baseline")) == 0);
  }

  TEST_CASE("el_kge with bpe is rejected") {
    Fixture f;
    auto kv = f.config("el_kge");
    kv["tokenization"] = "bpe";
    const auto errs = errors_of(kv);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].starts_with("tokenization"));
    kv["strategy"] = "sem_kge";
    CHECK(count_errors(kv) == 0);
  }

  TEST_CASE("deterministic override from the environment") {
    Fixture f;
    auto kv = f.config("baseline");
    kv["deterministic"] = "false";
    ::setenv("KGNMT_DETERMINISTIC", "1", 1);
    CHECK(validate_config(kv).deterministic);
    ::unsetenv("KGNMT_DETERMINISTIC");
    CHECK(!validate_config(kv).deterministic);
  }

  TEST_CASE("baseline smoke run on a 10-pair corpus") {
    Fixture f;
    const auto src = read_lines(f.data("train.en")), tgt = read_lines(f.data("train.de"));
    std::string s, t;
    for (int i = 0; i < 10; ++i) {
      s += src[static_cast<std::size_t>(i)] + "\n";
      t += tgt[static_cast<std::size_t>(i)] + "\n";
    }
    auto kv = f.config("baseline");
    kv["corpus.train.source"] = f.dir.write("ten.en", s);
    kv["corpus.train.target"] = f.dir.write("ten.de", t);
    const auto r = run_pipeline(validate_config(kv));
    CHECK(r.manifest.status == "completed");
    CHECK(r.report.sentences == 8);
    CHECK(r.report.bleu >= 0);
    const auto files = files_in(r.run_dir);
    for (const char* name : {"manifest.json", "model.ckpt", "report.txt", "report.tsv",
                             "translations.txt", "vocab.src", "vocab.tgt"}) {
      CAPTURE(name);
      CHECK(std::find(files.begin(), files.end(), name) != files.end());
    }
    CHECK(read_lines(r.run_dir + "/translations.txt").size() == 8);
  }

  TEST_CASE("runs never overwrite earlier runs") {
    Fixture f;
    const auto c = validate_config(f.config("baseline"));
    const auto a = run_pipeline(c);
    const std::string before = read_file(a.run_dir + "/manifest.json");
    const auto b = run_pipeline(c);
    CHECK(a.run_dir != b.run_dir);
    CHECK(fs::path(a.run_dir).filename() == "run-0001");
    CHECK(fs::path(b.run_dir).filename() == "run-0002");
    CHECK(read_file(a.run_dir + "/manifest.json") == before);
  }

  TEST_CASE("repeated runs are byte identical") {
    Fixture f;
    for (const char* strategy : {"sem_kge", "el_kge"}) {
      CAPTURE(strategy);
      const auto c = validate_config(f.config(strategy));
      const auto a = run_pipeline(c);
      const auto b = run_pipeline(c);
      const auto names = files_in(a.run_dir);
      REQUIRE(names == files_in(b.run_dir));
      CHECK(std::find(names.begin(), names.end(), "kge.vec") != names.end());
      for (const auto& n : names) {
        if (n == "manifest.json") continue;  // carries timings
        CAPTURE(n);
        CHECK(read_file(a.run_dir + "/" + n) == read_file(b.run_dir + "/" + n));
      }
      CHECK(a.manifest.artifacts == b.manifest.artifacts);
      CHECK(a.manifest.inputs == b.manifest.inputs);
      CHECK(a.manifest.config == b.manifest.config);
    }
  }

  TEST_CASE("a failing stage leaves a partial manifest") {
    Fixture f;
    auto kv = f.config("sem_kge");
    kv["kb.source"] = f.dir.write("broken.nt", "<http://x/a> <http://x/b> \"unterminated .\n");
    const auto c = validate_config(kv);
    try {
      run_pipeline(c);
      FAIL("expected a pipeline error");
    } catch (const PipelineError& e) {
      CHECK(!e.stage().empty());
      const std::string manifest = read_file(e.run_dir() + "/manifest.json");
      CHECK(manifest.find("\"status\": \"failed\"") != std::string::npos);
      CHECK(manifest.find("\"failed_stage\": \"" + e.stage() + "\"") != std::string::npos);
    }
  }

  TEST_CASE("synthetic data is deterministic and keeps held-out entities unseen") {
    SyntheticOptions o;
    o.entities = 30;
    o.held_out = 4;
    o.train_pairs = 50;
    o.test_pairs = 6;
    const auto a = generate_synthetic(o), b = generate_synthetic(o);
    CHECK(a.train.source == b.train.source);
    CHECK(a.test.target == b.test.target);
    REQUIRE(a.test_entities.size() == 6);
    for (const auto& e : a.entities) {
      if (!e.held_out) continue;
      for (const auto& s : a.train.source) {
        CHECK(join(s, " ").find(e.en) == std::string::npos);
      }
    }
  }

  TEST_CASE("command-line exit codes") {
    Fixture f;
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("no-such-command") == 1);
    const std::string good = write_config(f.dir, "good.cfg", f.config("baseline"));
    CHECK(run_cli("pipeline validate --config " + good) == 0);
    auto bad = f.config("el_kge");
    bad["tokenization"] = "bpe";
    CHECK(run_cli("pipeline validate --config " + write_config(f.dir, "bad.cfg", bad)) == 1);
    auto broken = f.config("sem_kge");
    broken["kb.source"] = f.dir.write("broken.nt", "not a triple\n");
    CHECK(run_cli("pipeline run --config " + write_config(f.dir, "broken.cfg", broken)) == 2);
    const std::string h = f.dir.write("h.txt", "a b c\n"), r = f.dir.write("r.txt", "a b c\n");
    CHECK(run_cli("eval --hyp " + h + " --ref " + r) == 0);
  }
}
