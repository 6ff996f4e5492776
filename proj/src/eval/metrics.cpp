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

#include "kgnmt/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "kgnmt/common/error.hpp"
#include "kgnmt/el/linker.hpp"

namespace kgnmt::eval {

namespace {

void check_lengths(std::size_t h, std::size_t r, const char* what) {
  if (h != r) {
    throw Error(std::string(what) + ": " + std::to_string(h) + " hypotheses vs " +
                std::to_string(r) + " references");
  }
}

template <typename Seq>
std::map<Seq, long> count_ngrams(const std::vector<typename Seq::value_type>& items, int n) {
  std::map<Seq, long> out;
  const auto len = static_cast<int>(items.size());
  for (int i = 0; i + n <= len; ++i) {
    out[Seq(items.begin() + i, items.begin() + i + n)] += 1;
  }
  return out;
}

std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

Smoothing parse_smoothing(std::string_view s) {
  if (s == "none") return Smoothing::none;
  if (s == "add_one") return Smoothing::add_one;
  throw ConfigError("unknown smoothing '" + std::string(s) + "' (expected none|add_one)");
}

NgramStats& NgramStats::operator+=(const NgramStats& o) {
  if (matches.size() < o.matches.size()) {
    matches.resize(o.matches.size());
    totals.resize(o.totals.size());
  }
  for (std::size_t i = 0; i < o.matches.size(); ++i) {
    matches[i] += o.matches[i];
    totals[i] += o.totals[i];
  }
  hyp_length += o.hyp_length;
  ref_length += o.ref_length;
  return *this;
}

NgramStats ngram_stats(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                       int max_n) {
  check_lengths(hyps.size(), refs.size(), "bleu");
  if (max_n < 1) throw Error("bleu: max_n must be >= 1");
  NgramStats s;
  s.matches.assign(static_cast<std::size_t>(max_n), 0);
  s.totals.assign(static_cast<std::size_t>(max_n), 0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    s.hyp_length += static_cast<long>(hyps[i].size());
    s.ref_length += static_cast<long>(refs[i].size());
    for (int n = 1; n <= max_n; ++n) {
      auto h = count_ngrams<Sentence>(hyps[i], n);
      auto r = count_ngrams<Sentence>(refs[i], n);
      for (const auto& [g, c] : h) {
        s.totals[static_cast<std::size_t>(n - 1)] += c;
        if (auto it = r.find(g); it != r.end()) {
          s.matches[static_cast<std::size_t>(n - 1)] += std::min(c, it->second);
        }
      }
    }
  }
  return s;
}

double brevity_penalty(long hyp_length, long ref_length) {
  if (hyp_length >= ref_length) return 1.0;
  if (hyp_length == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(ref_length) / static_cast<double>(hyp_length));
}

double bleu_from_stats(const NgramStats& s, Smoothing smoothing) {
  if (s.hyp_length == 0) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 0; n < s.matches.size(); ++n) {
    double m = static_cast<double>(s.matches[n]);
    double t = static_cast<double>(s.totals[n]);
    if (s.matches[n] == 0) {
      if (smoothing == Smoothing::none) return 0.0;
      m += 1;
      t += 1;
    }
    log_sum += std::log(m / t);
  }
  const double score =
      100.0 * brevity_penalty(s.hyp_length, s.ref_length) *
      std::exp(log_sum / static_cast<double>(s.matches.size()));
  return std::min(100.0, score);
}

double bleu(std::span<const Sentence> hyps, std::span<const Sentence> refs, int max_n,
            Smoothing smoothing) {
  check_lengths(hyps.size(), refs.size(), "bleu");
  if (hyps.empty()) throw Error("bleu: empty corpus");
  return bleu_from_stats(ngram_stats(hyps, refs, max_n), smoothing);
}

CharNgramStats char_ngram_stats(std::span<const std::string> hyps,
                                std::span<const std::string> refs, int max_n) {
  check_lengths(hyps.size(), refs.size(), "chrf");
  if (max_n < 1) throw Error("chrf: max_n must be >= 1");
  CharNgramStats s;
  s.hyp.assign(static_cast<std::size_t>(max_n), 0);
  s.ref.assign(static_cast<std::size_t>(max_n), 0);
  s.match.assign(static_cast<std::size_t>(max_n), 0);
  auto chars = [](const std::string& line) {
    std::vector<std::string> out;
    for (auto& c : utf8_chars(line)) {
      if (c != " " && c != "\t" && c != "\n" && c != "\r") out.push_back(std::move(c));
    }
    return out;
  };
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto hc = chars(hyps[i]);
    const auto rc = chars(refs[i]);
    for (int n = 1; n <= max_n; ++n) {
      const auto k = static_cast<std::size_t>(n - 1);
      auto h = count_ngrams<std::vector<std::string>>(hc, n);
      auto r = count_ngrams<std::vector<std::string>>(rc, n);
      for (const auto& [g, c] : h) {
        s.hyp[k] += c;
        if (auto it = r.find(g); it != r.end()) s.match[k] += std::min(c, it->second);
      }
      for (const auto& [g, c] : r) s.ref[k] += c;
    }
  }
  return s;
}

double chrf_from_stats(const CharNgramStats& s, double beta) {
  double p = 0, r = 0;
  int effective = 0;
  for (std::size_t k = 0; k < s.hyp.size(); ++k) {
    if (s.hyp[k] > 0 && s.ref[k] > 0) {
      p += static_cast<double>(s.match[k]) / static_cast<double>(s.hyp[k]);
      r += static_cast<double>(s.match[k]) / static_cast<double>(s.ref[k]);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  p /= effective;
  r /= effective;
  if (p + r == 0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * p * r / (b2 * p + r);
}

double chrf(std::span<const std::string> hyps, std::span<const std::string> refs, double beta,
            int max_n) {
  return chrf_from_stats(char_ngram_stats(hyps, refs, max_n), beta);
}

double chrf(std::span<const Sentence> hyps, std::span<const Sentence> refs, double beta,
            int max_n) {
  std::vector<std::string> h, r;
  for (const auto& s : hyps) h.push_back(join(s, " "));
  for (const auto& s : refs) r.push_back(join(s, " "));
  return chrf(h, r, beta, max_n);
}

std::size_t oov_count(std::span<const Sentence> hyps) {
  std::size_t n = 0;
  for (const auto& s : hyps) {
    for (const auto& t : s) n += t == "<unk>";
  }
  return n;
}

EntityAccuracy entity_accuracy(std::span<const Sentence> hyps, std::span<const EntityTest> tests) {
  if (tests.empty()) throw Error("entity_accuracy: empty test set");
  EntityAccuracy acc;
  for (const auto& t : tests) {
    if (t.sentence >= hyps.size()) {
      throw Error("entity_accuracy: sentence index " + std::to_string(t.sentence) +
                  " outside corpus of " + std::to_string(hyps.size()));
    }
    const auto want = split_ws(t.expected);
    const auto& h = hyps[t.sentence];
    bool found = false;
    if (!want.empty() && want.size() <= h.size()) {
      for (std::size_t i = 0; i + want.size() <= h.size() && !found; ++i) {
        found = std::equal(want.begin(), want.end(), h.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    acc.correct += found;
    ++acc.total;
  }
  return acc;
}

std::vector<EntityTest> read_entity_tests(const std::string& path) {
  std::vector<EntityTest> out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("expected index<TAB>surface", line_no);
    EntityTest t;
    try {
      std::size_t pos = 0;
      t.sentence = std::stoul(line.substr(0, tab), &pos);
      if (pos != tab) throw std::invalid_argument("index");
    } catch (const std::exception&) {
      throw FormatError("bad sentence index", line_no);
    }
    t.expected = line.substr(tab + 1);
    out.push_back(std::move(t));
  }
  return out;
}

void write_entity_tests(std::ostream& out, std::span<const EntityTest> tests) {
  for (const auto& t : tests) out << t.sentence << '\t' << t.expected << '\n';
}

EvalReport evaluate(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                    std::span<const EntityTest> tests) {
  check_lengths(hyps.size(), refs.size(), "evaluate");
  std::vector<Sentence> h, r;
  for (const auto& s : hyps) h.push_back(el::strip_annotations(s));
  for (const auto& s : refs) r.push_back(el::strip_annotations(s));
  EvalReport rep;
  rep.sentences = h.size();
  rep.bleu = bleu(h, r);
  rep.chrf3 = chrf(std::span<const Sentence>(h), std::span<const Sentence>(r), 3.0, 6);
  rep.oov = oov_count(h);
  if (!tests.empty()) rep.entities = entity_accuracy(h, tests);
  return rep;
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << "bleu " << fixed(r.bleu, 4) << '\n'
      << "chrf3 " << fixed(r.chrf3, 4) << '\n'
      << "meteor unsupported\n"
      << "oov " << r.oov << '\n';
  if (r.entities) {
    out << "entity_accuracy " << fixed(r.entities->fraction(), 6) << '\n'
        << "entity_correct " << r.entities->correct << '\n'
        << "entity_total " << r.entities->total << '\n';
  }
  out << "sentences " << r.sentences << '\n';
}

void write_report_tsv(std::ostream& out, const EvalReport& r) {
  out << fixed(r.bleu, 4) << '\t' << fixed(r.chrf3, 4) << '\t' << r.oov << '\t'
      << (r.entities ? fixed(r.entities->fraction(), 6) : std::string("NA")) << '\t'
      << r.sentences << '\n';
}

}  // namespace kgnmt::eval
