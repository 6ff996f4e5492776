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
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/eval/metrics.hpp"
#include "bleu_fixture.hpp"
#include "test_util.hpp"

using namespace kgnmt;
using namespace kgnmt::eval;
using test::kHyps;
using test::kRefs;
using test::kSacreBleu;

namespace {

std::vector<Sentence> split_all(const std::vector<std::string>& lines) {
  std::vector<Sentence> out;
  for (const auto& l : lines) out.push_back(split_ws(l));
  return out;
}

std::vector<Sentence> one(const std::string& line) { return {split_ws(line)}; }

// Multiset intersection of character n-grams, computed the slow way.
struct Counts {
  double precision = 0, recall = 0;
  int orders = 0;
};

Counts brute_char_ngrams(const std::string& hyp, const std::string& ref, int max_n) {
  Counts c;
  for (int n = 1; n <= max_n; ++n) {
    std::vector<std::string> h, r;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) h.push_back(hyp.substr(i, n));
    for (std::size_t i = 0; i + n <= ref.size(); ++i) r.push_back(ref.substr(i, n));
    if (h.empty() || r.empty()) continue;
    int match = 0;
    std::vector<bool> used(r.size(), false);
    for (const auto& g : h) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (!used[j] && r[j] == g) {
          used[j] = true;
          ++match;
          break;
        }
      }
    }
    c.precision += static_cast<double>(match) / h.size();
    c.recall += static_cast<double>(match) / r.size();
    ++c.orders;
  }
  c.precision /= c.orders;
  c.recall /= c.orders;
  return c;
}

double f_beta(double p, double r, double beta) {
  if (p + r == 0) return 0;
  const double b2 = beta * beta;
  return 100 * (1 + b2) * p * r / (b2 * p + r);
}

Sentence random_sentence(std::mt19937_64& rng) {
  static const std::vector<std::string> words{"a", "b", "cat", "Haus", "\xc3\xa9t\xc3\xa9", "x1", "."};
  Sentence s;
  const int n = std::uniform_int_distribution<int>(1, 15)(rng);
  for (int i = 0; i < n; ++i) s.push_back(words[rng() % words.size()]);
  return s;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("identity scores 100") {
    const auto x = one("the cat sat on the mat");
    CHECK(bleu(x, x) == 100.0);
    CHECK(chrf(x, x) == 100.0);
  }

  TEST_CASE("clipped unigram precision") {
    const auto s = ngram_stats(one("the the the the"), one("the cat"), 4);
    CHECK(s.matches[0] == 1);
    CHECK(s.totals[0] == 4);
    CHECK(s.matches[1] == 0);
    CHECK(s.totals[1] == 3);
  }

  TEST_CASE("brevity penalty") {
    const auto s = ngram_stats(one("the cat sat"), one("the cat sat on the mat"), 4);
    CHECK(s.hyp_length == 3);
    CHECK(s.ref_length == 6);
    CHECK(brevity_penalty(3, 6) == doctest::Approx(std::exp(1.0 - 6.0 / 3.0)));
    CHECK(brevity_penalty(7, 6) == 1.0);
    CHECK(brevity_penalty(0, 6) == 0.0);
    // Precisions are all 1, so the score is the penalty itself.
    CHECK(bleu(one("the cat sat"), one("the cat sat on the mat"), 3, Smoothing::none) ==
          doctest::Approx(100 * std::exp(-1.0)));
  }

  TEST_CASE("smoothing of empty orders") {
    const auto h = one("a b c"), r = one("a b d");
    // Orders: 2/3, 1/2, 0/1 -> add_one gives 1/2 for the third.
    const double expect = 100 * std::exp((std::log(2.0 / 3) + std::log(0.5) + std::log(0.5)) / 3);
    CHECK(bleu(h, r, 3, Smoothing::add_one) == doctest::Approx(expect));
    CHECK(bleu(h, r, 3, Smoothing::none) == 0.0);
    CHECK(parse_smoothing("none") == Smoothing::none);
    CHECK_THROWS(parse_smoothing("exp"));
  }

  TEST_CASE("BLEU agrees with sacrebleu on a 20-sentence fixture") {
    const auto h = split_all(kHyps), r = split_all(kRefs);
    REQUIRE(h.size() == 20);
    const auto s = ngram_stats(h, r, 4);
    CHECK(s.matches == std::vector<long>{131, 97, 68, 49});
    CHECK(s.totals == std::vector<long>{148, 128, 108, 88});
    CHECK(s.ref_length == 149);
    CHECK(std::abs(bleu(h, r) - kSacreBleu) <= 0.1);
    CHECK(std::abs(bleu(h, r, 4, Smoothing::none) - kSacreBleu) <= 0.1);
  }

  TEST_CASE("BLEU input errors") {
    const auto a = one("x");
    const std::vector<Sentence> two{{"x"}, {"y"}};
    CHECK_THROWS(bleu(a, two));
    CHECK_THROWS(bleu(std::vector<Sentence>{}, std::vector<Sentence>{}));
    CHECK_THROWS(chrf(a, two));
  }

  TEST_CASE("chrF on abcd vs abce") {
    const std::vector<std::string> h{"abcd"}, r{"abce"};
    // Orders 1..4: 3/4, 2/3, 1/2, 0/1 for both precision and recall.
    CHECK(std::abs(chrf(h, r) - 100.0 * 23.0 / 48.0) <= 1e-6);
    const auto c = brute_char_ngrams("abcd", "abce", 6);
    CHECK(std::abs(chrf(h, r) - f_beta(c.precision, c.recall, 3)) <= 1e-6);
  }

  TEST_CASE("chrF hand values with unequal precision and recall") {
    const std::vector<std::string> h{"ab"}, r{"abc"};
    // Order 1: P 1, R 2/3. Order 2: P 1, R 1/2.
    const double p = 1.0, rc = (2.0 / 3 + 0.5) / 2;
    CHECK(std::abs(chrf(h, r) - f_beta(p, rc, 3)) <= 1e-6);
    CHECK(std::abs(chrf(h, r, 1.0) - f_beta(p, rc, 1)) <= 1e-6);
  }

  TEST_CASE("chrF ignores whitespace") {
    CHECK(chrf(std::vector<std::string>{"a b c"}, std::vector<std::string>{"abc"}) == 100.0);
    const std::vector<std::string> h{"the cat"}, r{"the hat"};
    const auto c = brute_char_ngrams("thecat", "thehat", 6);
    CHECK(std::abs(chrf(h, r) - f_beta(c.precision, c.recall, 3)) <= 1e-6);
  }

  TEST_CASE("chrF on random pairs matches the brute-force oracle") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const auto hs = join(random_sentence(rng), " "), rs = join(random_sentence(rng), " ");
      auto strip = [](std::string s) {
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        return s;
      };
      const auto c = brute_char_ngrams(strip(hs), strip(rs), 6);
      // The oracle works on bytes; restrict to ASCII pairs.
      if (hs.find('\xc3') != std::string::npos || rs.find('\xc3') != std::string::npos) continue;
      CHECK(std::abs(chrf(std::vector<std::string>{hs}, std::vector<std::string>{rs}) -
                     f_beta(c.precision, c.recall, 3)) <= 1e-6);
    }
  }

  TEST_CASE("chrF edge cases") {
    CHECK(chrf(std::vector<std::string>{""}, std::vector<std::string>{"abc"}) == 0.0);
    CHECK(chrf(std::vector<std::string>{"xyz"}, std::vector<std::string>{"abc"}) == 0.0);
    // Code points, not bytes.
    CHECK(chrf(std::vector<std::string>{"\xc3\xa9"}, std::vector<std::string>{"\xc3\xa8"}) == 0.0);
  }

  TEST_CASE("chrF approaches recall as beta grows") {
    const std::vector<std::string> h{"abcdxyz"}, r{"abcd"};
    const auto c = brute_char_ngrams("abcdxyz", "abcd", 6);
    REQUIRE(c.precision != c.recall);
    double last = 1e9;
    for (double beta : {1.0, 3.0, 10.0}) {
      const double gap = std::abs(chrf(h, r, beta) - 100 * c.recall);
      CHECK(gap < last);
      last = gap;
    }
  }

  TEST_CASE("identity is 100 on random corpora") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Sentence> x(1 + rng() % 8);
      for (auto& s : x) s = random_sentence(rng);
      CHECK(bleu(x, x) == 100.0);
      CHECK(chrf(x, x) == 100.0);
    }
  }

  TEST_CASE("scores are bounded and permutation invariant") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Sentence> h(2 + rng() % 6), r(h.size());
      for (auto& s : h) s = random_sentence(rng);
      for (auto& s : r) s = random_sentence(rng);
      const double b = bleu(h, r), c = chrf(h, r);
      CHECK(b >= 0);
      CHECK(b <= 100);
      CHECK(c >= 0);
      CHECK(c <= 100);
      std::vector<std::size_t> order(h.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<Sentence> hp, rp;
      for (auto i : order) {
        hp.push_back(h[i]);
        rp.push_back(r[i]);
      }
      CHECK(bleu(hp, rp) == doctest::Approx(b).epsilon(1e-12));
      CHECK(chrf(hp, rp) == doctest::Approx(c).epsilon(1e-12));
    }
  }

  TEST_CASE("OOV count") {
    CHECK(oov_count(one("a <unk> b <unk>")) == 2);
    CHECK(oov_count(std::vector<Sentence>{}) == 0);
    CHECK(oov_count(one("<UNK> unk")) == 0);
  }

  TEST_CASE("entity accuracy") {
    const std::vector<Sentence> hyps{{"ich", "mag", "Großbritannien"},
                                     {"der", "Krebs", "wächst"},
                                     {"in", "New", "York"},
                                     {"nichts"}};
    const std::vector<EntityTest> tests{{0, "Großbritannien"}, {1, "Krebs"}, {2, "New York"},
                                        {3, "Tschad"}};
    const auto a = entity_accuracy(hyps, tests);
    CHECK(a.correct == 3);
    CHECK(a.total == 4);
    CHECK(a.fraction() == 0.75);
    CHECK(entity_accuracy(hyps, std::vector<EntityTest>{{2, "new York"}}).correct == 0);
    CHECK(entity_accuracy(hyps, std::vector<EntityTest>{{2, "York New"}}).correct == 0);
    CHECK_THROWS(entity_accuracy(hyps, std::vector<EntityTest>{}));
    CHECK_THROWS(entity_accuracy(hyps, std::vector<EntityTest>{{4, "x"}}));
    CHECK(entity_accuracy(hyps, std::vector<EntityTest>{{0, "ich"}, {2, "York"}}).fraction() == 1.0);
  }

  TEST_CASE("entity test files") {
    test::TempDir dir;
    const std::vector<EntityTest> tests{{0, "Großbritannien"}, {12, "New York"}};
    std::ostringstream out;
    write_entity_tests(out, tests);
    CHECK(out.str() == "0\tGroßbritannien\n12\tNew York\n");
    const auto back = read_entity_tests(dir.write("e.tsv", out.str()));
    REQUIRE(back.size() == 2);
    CHECK(back[1].sentence == 12);
    CHECK(back[1].expected == "New York");
    CHECK_THROWS_AS(read_entity_tests(dir.write("bad.tsv", "x\ty\n")), FormatError);
    CHECK_THROWS_AS(read_entity_tests(dir.write("bad2.tsv", "3 y\n")), FormatError);
  }

  TEST_CASE("evaluate strips annotations and writes both report forms") {
    const std::vector<Sentence> hyps{{"der", "Krebs|dbr_de_Krebs"}, {"<unk>", "x"}};
    const std::vector<Sentence> refs{{"der", "Krebs"}, {"y", "x"}};
    const std::vector<EntityTest> tests{{0, "Krebs"}};
    const auto r = evaluate(hyps, refs, tests);
    CHECK(r.sentences == 2);
    CHECK(r.oov == 1);
    REQUIRE(r.entities);
    CHECK(r.entities->correct == 1);
    CHECK(r.bleu == doctest::Approx(bleu(std::vector<Sentence>{{"der", "Krebs"}, {"<unk>", "x"}}, refs)));
    std::ostringstream kv, tsv;
    write_report(kv, r);
    write_report_tsv(tsv, r);
    CHECK(kv.str().find("meteor unsupported\n") != std::string::npos);
    CHECK(kv.str().find("oov 1\n") != std::string::npos);
    CHECK(kv.str().find("entity_accuracy 1.000000\n") != std::string::npos);
    CHECK(kv.str().ends_with("sentences 2\n"));
    std::vector<std::string> fields;
    std::istringstream line(tsv.str());
    for (std::string f; std::getline(line, f, '\t');) fields.push_back(f);
    fields.back().pop_back();  // newline
    REQUIRE(fields.size() == 5);
    CHECK(fields[2] == "1");
    CHECK(fields[3] == "1.000000");
    CHECK(fields[4] == "2");
    std::ostringstream none;
    write_report_tsv(none, evaluate(refs, refs));
    CHECK(none.str() == "100.0000\t100.0000\t0\tNA\t2\n");
  }
}
