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

#ifndef KGNMT_EVAL_METRICS_HPP_
#define KGNMT_EVAL_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgnmt/common/text.hpp"

namespace kgnmt::eval {

enum class Smoothing { none, add_one };

Smoothing parse_smoothing(std::string_view s);

// Corpus-level clipped n-gram counts.
struct NgramStats {
  std::vector<long> matches;  // per order 1..max_n
  std::vector<long> totals;
  long hyp_length = 0;
  long ref_length = 0;

  NgramStats& operator+=(const NgramStats& o);
};

NgramStats ngram_stats(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                       int max_n = 4);
double brevity_penalty(long hyp_length, long ref_length);
double bleu_from_stats(const NgramStats& s, Smoothing smoothing = Smoothing::add_one);

// Corpus BLEU in [0, 100] over pre-tokenized text. add_one replaces the
// precision of an order without matches by 1 / (total + 1).
double bleu(std::span<const Sentence> hyps, std::span<const Sentence> refs, int max_n = 4,
            Smoothing smoothing = Smoothing::add_one);

// Per-order character n-gram counts with whitespace removed.
struct CharNgramStats {
  std::vector<long> hyp;
  std::vector<long> ref;
  std::vector<long> match;
};

CharNgramStats char_ngram_stats(std::span<const std::string> hyps,
                                std::span<const std::string> refs, int max_n = 6);
// Precision and recall are averaged over the orders with both counts
// nonzero, then combined as F_beta; 0 when no order qualifies.
double chrf_from_stats(const CharNgramStats& s, double beta = 3.0);
double chrf(std::span<const std::string> hyps, std::span<const std::string> refs,
            double beta = 3.0, int max_n = 6);
double chrf(std::span<const Sentence> hyps, std::span<const Sentence> refs, double beta = 3.0,
            int max_n = 6);

// Occurrences of the literal "<unk>" token.
std::size_t oov_count(std::span<const Sentence> hyps);

struct EntityTest {
  std::size_t sentence = 0;
  std::string expected;  // target surface, possibly several tokens
};

struct EntityAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double fraction() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

// An entry counts when its expected tokens occur contiguously (case
// sensitive) in the hypothesis at its index. Throws on an empty test set
// or an index outside the corpus.
EntityAccuracy entity_accuracy(std::span<const Sentence> hyps, std::span<const EntityTest> tests);

// "index<TAB>surface" per line.
std::vector<EntityTest> read_entity_tests(const std::string& path);
void write_entity_tests(std::ostream& out, std::span<const EntityTest> tests);

struct EvalReport {
  double bleu = 0;
  double chrf3 = 0;
  std::size_t oov = 0;
  std::optional<EntityAccuracy> entities;
  std::size_t sentences = 0;
};

// Strips annotations from both sides, then computes every metric.
EvalReport evaluate(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                    std::span<const EntityTest> tests = {});

// "key value" lines; meteor is reported as unsupported.
void write_report(std::ostream& out, const EvalReport& r);
// bleu, chrf3, oov, entity_acc, n_sentences separated by tabs.
void write_report_tsv(std::ostream& out, const EvalReport& r);

}  // namespace kgnmt::eval

#endif  // KGNMT_EVAL_METRICS_HPP_
