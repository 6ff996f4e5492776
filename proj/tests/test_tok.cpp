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

#include <random>
#include <sstream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/tok/bpe.hpp"
#include "kgnmt/tok/vocab.hpp"

using namespace kgnmt;
using namespace kgnmt::tok;

namespace {

std::string random_word(std::mt19937_64& rng) {
  static const std::vector<std::string> alphabet{"a", "b", "c", "d", "e", "\xc3\xa9", "\xc3\xbc",
                                                 "_", "-", "1"};
  const int n = std::uniform_int_distribution<int>(1, 8)(rng);
  std::string w;
  for (int i = 0; i < n; ++i) w += alphabet[rng() % alphabet.size()];
  return w;
}

}  // namespace

TEST_SUITE("tok") {
  TEST_CASE("zero merges") {
    CHECK(learn_bpe(Sentence{"aaab", "aaab"}, 0).empty());
  }

  TEST_CASE("first merge of aaab aaab") {
    const auto m = learn_bpe(Sentence{"aaab", "aaab"}, 1);
    REQUIRE(m.size() == 1);
    CHECK(m.merges()[0] == MergeTable::Pair{"a", "a"});
  }

  TEST_CASE("32000 merges on a tiny corpus stop early") {
    const auto m = learn_bpe(Sentence{"low", "low", "lower"}, 32000);
    CHECK(m.size() == 2);
  }

  TEST_CASE("empty merge table yields characters with end marker") {
    CHECK(apply_bpe(Sentence{"kiwi"}, MergeTable{}) == Sentence{"k", "i", "w", "i</w>"});
    CHECK(initial_symbols("\xc3\xa9t\xc3\xa9") == std::vector<std::string>{"\xc3\xa9", "t", "\xc3\xa9</w>"});
  }

  TEST_CASE("lowest under merges learned from low and lower") {
    // Hand simulation with min_frequency 1 on {low, low, lower}:
    // (l,o)=3 -> lo; (lo,w</w>)=2 -> low</w>; then all pairs have count 1
    // and (e,r</w>) is the lexicographically smallest.
    const auto m = learn_bpe(Sentence{"low", "low", "lower"}, 3, annotation_tokens(), 1);
    REQUIRE(m.size() == 3);
    CHECK(m.merges()[0] == MergeTable::Pair{"l", "o"});
    CHECK(m.merges()[1] == MergeTable::Pair{"lo", "w</w>"});
    CHECK(m.merges()[2] == MergeTable::Pair{"e", "r</w>"});
    CHECK(apply_bpe(Sentence{"lowest"}, m) == Sentence{"lo", "w", "e", "s", "t</w>"});
    CHECK(apply_bpe(Sentence{"low"}, m) == Sentence{"low</w>"});
    CHECK(apply_bpe(Sentence{"lower"}, m) == Sentence{"lo", "w", "er</w>"});
  }

  TEST_CASE("protected annotation tokens pass through") {
    const Sentence corpus{"Kiwi|dbr_Kiwi", "kiwi", "kiwi", "Kiwi|dbr_Kiwi"};
    const auto m = learn_bpe(corpus, 50);
    for (const auto& [l, r] : m.merges()) {
      CHECK(l.find('|') == std::string::npos);
      CHECK(r.find('|') == std::string::npos);
    }
    const auto out = apply_bpe(Sentence{"a", "Kiwi|dbr_Kiwi", "kiwi"}, m);
    CHECK(std::count(out.begin(), out.end(), "Kiwi|dbr_Kiwi") == 1);
    CHECK(debpe(out) == Sentence{"a", "Kiwi|dbr_Kiwi", "kiwi"});
  }

  TEST_CASE("debpe after apply is the identity on random corpora") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
      Sentence corpus;
      const int n = std::uniform_int_distribution<int>(1, 30)(rng);
      for (int i = 0; i < n; ++i) {
        corpus.push_back(rng() % 10 == 0 ? random_word(rng) + "|dbr_" + random_word(rng)
                                         : random_word(rng));
      }
      const auto merges = learn_bpe(corpus, static_cast<int>(rng() % 40), annotation_tokens(),
                                    1 + static_cast<int>(rng() % 2));
      const auto out = apply_bpe(corpus, merges);
      CHECK(debpe(out) == corpus);
      for (const auto& tok : corpus) {
        if (!annotation_tokens()(tok)) continue;
        CHECK(std::count(out.begin(), out.end(), tok) == std::count(corpus.begin(), corpus.end(), tok));
      }
    }
  }

  TEST_CASE("learning is deterministic") {
    std::mt19937_64 rng(3);
    Sentence corpus;
    for (int i = 0; i < 200; ++i) corpus.push_back(random_word(rng));
    CHECK(learn_bpe(corpus, 30, annotation_tokens(), 1).merges() ==
          learn_bpe(corpus, 30, annotation_tokens(), 1).merges());
  }

  TEST_CASE("merges file round trip and header check") {
    const auto m = learn_bpe(Sentence{"low", "low", "lower"}, 3, annotation_tokens(), 1);
    std::ostringstream out;
    write_merges(out, m);
    CHECK(out.str().starts_with("#bpe v1\n"));
    std::istringstream in(out.str());
    CHECK(read_merges(in).merges() == m.merges());
    std::istringstream bad("l o\n");
    CHECK_THROWS_AS(read_merges(bad), FormatError);
    MergeTable dup;
    dup.add("a", "b");
    CHECK_THROWS(dup.add("a", "b"));
  }

  TEST_CASE("vocabulary of one token") {
    const auto v = build_vocab(std::vector<Sentence>{{"x"}}, 10);
    CHECK(v.tokens() == std::vector<std::string>{"<pad>", "<unk>", "<s>", "</s>", "x"});
    CHECK(v.id("x") == 4);
  }

  TEST_CASE("frequency ties at the cutoff keep the smaller token") {
    const auto v = build_vocab(std::vector<Sentence>{{"b", "a", "c", "c"}}, 6);
    CHECK(v.size() == 6);
    CHECK(v.contains("c"));
    CHECK(v.contains("a"));
    CHECK(!v.contains("b"));
  }

  TEST_CASE("vocabulary limits") {
    CHECK_THROWS(build_vocab(std::vector<Sentence>{{"x"}}, 4));
    const auto v = build_vocab(std::vector<Sentence>{{"x"}}, 50000);
    CHECK(v.max_size() == 50000);
  }

  TEST_CASE("numericalize round trip and unknowns") {
    const auto v = build_vocab(std::vector<Sentence>{{"the", "cat", "sat"}}, 100);
    const Sentence s{"the", "cat", "sat"};
    CHECK(denumericalize(numericalize(s, v), v) == s);
    CHECK(numericalize(Sentence{"dog"}, v) == std::vector<int>{Vocabulary::kUnk});
    const Sentence mixed{"the", "dog", "sat", "on", "cat"};
    const auto ids = numericalize(mixed, v);
    int unk = 0;
    for (std::size_t i = 0; i < mixed.size(); ++i) {
      const bool oov = !v.contains(mixed[i]);
      unk += oov;
      CHECK((ids[i] == Vocabulary::kUnk) == oov);
    }
    CHECK(unk == 2);
    CHECK(std::count(ids.begin(), ids.end(), Vocabulary::kUnk) == 2);
    CHECK(denumericalize(ids, v)[1] == "<unk>");
  }

  TEST_CASE("vocabulary ids are contiguous and files round trip") {
    std::mt19937_64 rng(6);
    std::vector<Sentence> corpus(20);
    for (auto& s : corpus) {
      for (int i = 0; i < 10; ++i) s.push_back(random_word(rng));
    }
    const auto v = build_vocab(corpus, 60);
    CHECK(v.size() <= 60);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.id(v.token(static_cast<int>(i))) == static_cast<int>(i));
    std::ostringstream out;
    write_vocab(out, v);
    std::istringstream in(out.str());
    const auto back = read_vocab(in);
    CHECK(back == v);
    CHECK(back.hash() == v.hash());
  }

  TEST_CASE("extension appends unseen tokens") {
    const auto v = build_vocab(std::vector<Sentence>{{"a", "b"}}, 6);
    const std::vector<std::string> extra{"b", "kiwi|dbr_Kiwi", "c"};
    const auto e = v.extended(extra);
    CHECK(e.size() == v.size() + 2);
    CHECK(e.id("kiwi|dbr_Kiwi") == static_cast<int>(v.size()));
    CHECK(e.max_size() == v.max_size() + 2);
    CHECK(e.hash() != v.hash());
  }
}
