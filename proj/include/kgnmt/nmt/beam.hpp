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

#ifndef KGNMT_NMT_BEAM_HPP_
#define KGNMT_NMT_BEAM_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "kgnmt/tok/vocab.hpp"

namespace kgnmt::nmt {

struct Hypothesis {
  std::vector<int> tokens;              // emitted ids, EOS excluded
  std::vector<double> step_log_probs;   // one per decoding step, EOS included
  std::vector<std::vector<double>> attention;  // one distribution per step
  double log_prob = 0;
  double score = 0;  // log_prob / number of steps
  bool finished = false;
};

// A session type provides
//   auto step(const std::vector<int>& prev) -> { log_probs (V x K), attention (L x K) }
//   void select(const std::vector<int>& parents)
// over K live hypotheses; see DecodeSession.

namespace detail {

template <typename Out>
std::vector<double> column(const Out& m, Eigen::Index j) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = static_cast<double>(m(i, j));
  return v;
}

inline void finish(Hypothesis& h, bool eos) {
  h.finished = eos;
  h.score = h.step_log_probs.empty() ? 0.0
                                     : h.log_prob / static_cast<double>(h.step_log_probs.size());
}

}  // namespace detail

// Argmax decoding; ties go to the lower token id.
template <typename Session>
Hypothesis greedy_decode(Session& session, int max_out_len, int bos = tok::Vocabulary::kBos,
                         int eos = tok::Vocabulary::kEos) {
  Hypothesis h;
  int prev = bos;
  for (int t = 0; t < max_out_len; ++t) {
    auto out = session.step({prev});
    Eigen::Index best = 0;
    for (Eigen::Index w = 1; w < out.log_probs.rows(); ++w) {
      if (out.log_probs(w, 0) > out.log_probs(best, 0)) best = w;
    }
    const double lp = static_cast<double>(out.log_probs(best, 0));
    h.step_log_probs.push_back(lp);
    h.log_prob += lp;
    h.attention.push_back(detail::column(out.attention, 0));
    if (best == eos) {
      detail::finish(h, true);
      return h;
    }
    h.tokens.push_back(static_cast<int>(best));
    prev = static_cast<int>(best);
  }
  detail::finish(h, false);
  return h;
}

// Keeps the `beam` best extensions by cumulative log-probability at every
// step (ties: lower parent, then lower token id). Hypotheses end at EOS or
// after max_out_len steps; the result is ranked by length-normalized score.
template <typename Session>
std::vector<Hypothesis> beam_search(Session& session, int beam, int max_out_len,
                                    int bos = tok::Vocabulary::kBos,
                                    int eos = tok::Vocabulary::kEos) {
  if (beam < 1) throw std::invalid_argument("beam_search: beam must be >= 1");
  std::vector<Hypothesis> live(1);
  std::vector<int> prev{bos};
  std::vector<Hypothesis> done;
  for (int t = 0; t < max_out_len && !live.empty(); ++t) {
    auto out = session.step(prev);
    using Cand = std::tuple<double, int, int>;  // score, parent, token
    std::vector<Cand> cands;
    for (Eigen::Index k = 0; k < out.log_probs.cols(); ++k) {
      for (Eigen::Index w = 0; w < out.log_probs.rows(); ++w) {
        const double lp = static_cast<double>(out.log_probs(w, k));
        if (!std::isfinite(lp)) continue;
        cands.emplace_back(live[static_cast<std::size_t>(k)].log_prob + lp, static_cast<int>(k),
                           static_cast<int>(w));
      }
    }
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(beam), cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), [](const Cand& a, const Cand& b) {
                        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
                        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
                        return std::get<2>(a) < std::get<2>(b);
                      });
    std::vector<Hypothesis> next;
    std::vector<int> parents;
    std::vector<int> next_prev;
    for (std::size_t c = 0; c < keep; ++c) {
      const auto [score, k, w] = cands[c];
      Hypothesis h = live[static_cast<std::size_t>(k)];
      const double lp = static_cast<double>(out.log_probs(w, k));
      h.step_log_probs.push_back(lp);
      h.log_prob = score;
      h.attention.push_back(detail::column(out.attention, k));
      if (w == eos) {
        detail::finish(h, true);
        done.push_back(std::move(h));
        continue;
      }
      h.tokens.push_back(w);
      if (t + 1 == max_out_len) {
        detail::finish(h, false);
        done.push_back(std::move(h));
        continue;
      }
      next.push_back(std::move(h));
      parents.push_back(k);
      next_prev.push_back(w);
    }
    if (static_cast<int>(done.size()) >= beam) break;
    if (!next.empty()) session.select(parents);
    live = std::move(next);
    prev = std::move(next_prev);
  }
  std::stable_sort(done.begin(), done.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
  return done;
}

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_BEAM_HPP_
