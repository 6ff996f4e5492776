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

#include <cmath>
#include <random>

#include "kgnmt/common/error.hpp"
#include "kgnmt/kb/lexicon.hpp"
#include "kgnmt/nmt/beam.hpp"
#include "kgnmt/nmt/checkpoint.hpp"
#include "kgnmt/nmt/config.hpp"
#include "kgnmt/nmt/grad_check.hpp"
#include "kgnmt/nmt/graph.hpp"
#include "kgnmt/nmt/layers.hpp"
#include "kgnmt/nmt/model.hpp"
#include "kgnmt/nmt/train.hpp"
#include "kgnmt/nmt/unk.hpp"
#include "kgnmt/tok/vocab.hpp"
#include "test_util.hpp"

using namespace kgnmt;
using namespace kgnmt::nmt;

namespace {

using MatD = Mat<double>;
using VecD = Vec<double>;

MatD random_mat(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double s = 1.0) {
  std::uniform_real_distribution<double> d(-s, s);
  MatD m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

void randomize(const std::vector<Parameter<double>*>& ps, std::mt19937_64& rng, double s = 0.5) {
  for (auto* p : ps) p->value = random_mat(p->value.rows(), p->value.cols(), rng, s);
}

// Scalar probe: sum(x .* R) with a fixed random R, so every output entry
// carries a distinct weight.
Var<double> probe(Graph<double>& g, Var<double> x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(cwise_mul(x, g.constant(random_mat(x.rows(), x.cols(), rng))));
}

// Reverse-mode vs central differences for an op of graph inputs.
double op_error(const std::vector<MatD>& inputs,
                const std::function<Var<double>(Graph<double>&, std::vector<Var<double>>&)>& f) {
  std::vector<Parameter<double>> ps(inputs.size());
  std::vector<Parameter<double>*> ptrs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    ps[i].name = "x" + std::to_string(i);
    ps[i].value = inputs[i];
    ptrs.push_back(&ps[i]);
  }
  return grad_check(ptrs, [&](Graph<double>& g) {
           std::vector<Var<double>> xs;
           for (auto& p : ps) xs.push_back(g.param(p));
           return probe(g, f(g, xs), 99);
         })
      .max_relative_error;
}

ModelConfig tiny(Architecture arch) {
  ModelConfig c;
  c.arch = arch;
  c.emb_dim = 4;
  c.hidden = 4;
  c.layers = 2;
  c.heads = 2;
  c.ffn = 8;
  return c;
}

std::vector<Example> tiny_batch() {
  return {{{4, 5, 6}, {5, 4}}, {{6, 4, 4}, {6, 6, 5}}};
}

std::vector<MatD> snapshot(Seq2Seq<float>& m) {
  std::vector<MatD> out;
  for (auto* p : m.parameters()) out.push_back(p->value.cast<double>());
  return out;
}

// Two decoding steps over tokens {a = 4, b = 5}, then a forced EOS. The
// session tracks the prefix of every live hypothesis.
struct TwoStepSession {
  double p1a;           // P(a) at step 1
  double p2a_given[2];  // P(a) at step 2 given the first token (a, b)
  std::vector<std::vector<int>> prefixes{{}};

  StepOutput<double> step(const std::vector<int>& prev) {
    (void)prev;
    const auto k = static_cast<Eigen::Index>(prefixes.size());
    StepOutput<double> out;
    out.log_probs = MatD::Constant(6, k, -std::numeric_limits<double>::infinity());
    out.attention = MatD::Ones(1, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& pre = prefixes[static_cast<std::size_t>(j)];
      if (pre.empty()) {
        out.log_probs(4, j) = std::log(p1a);
        out.log_probs(5, j) = std::log(1 - p1a);
      } else if (pre.size() == 1) {
        const double pa = p2a_given[pre[0] == 4 ? 0 : 1];
        out.log_probs(4, j) = std::log(pa);
        out.log_probs(5, j) = std::log(1 - pa);
      } else {
        out.log_probs(tok::Vocabulary::kEos, j) = 0;
      }
    }
    pending_ = prev;
    return out;
  }
  void select(const std::vector<int>& parents) {
    std::vector<std::vector<int>> next;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      auto p = prefixes[static_cast<std::size_t>(parents[i])];
      next.push_back(p);
    }
    prefixes = std::move(next);
    tokens_pending_ = true;
  }
  // Appends the tokens chosen at the last step (called by the wrapper).
  std::vector<int> pending_;
  bool tokens_pending_ = false;
};

// Adapts TwoStepSession to the session contract: the prev tokens handed to
// step() are the tokens chosen for each surviving hypothesis.
struct TwoStepAdapter {
  TwoStepSession s;
  bool first = true;
  StepOutput<double> step(const std::vector<int>& prev) {
    if (!first) {
      for (std::size_t i = 0; i < prev.size(); ++i) s.prefixes[i].push_back(prev[i]);
    }
    first = false;
    return s.step(prev);
  }
  void select(const std::vector<int>& parents) { s.select(parents); }
};

}  // namespace

TEST_SUITE("nmt") {
  TEST_CASE("rnn and transformer config defaults") {
    const auto rnn = TrainConfig::rnn_defaults();
    CHECK(rnn.batch_size == 32);
    CHECK(rnn.optimizer == OptimizerKind::sgd);
    CHECK(rnn.lr == doctest::Approx(0.0002));
    CHECK(rnn.dropout == doctest::Approx(0.3));
    CHECK(rnn.max_len == 80);
    const auto tr = TrainConfig::transformer_defaults();
    CHECK(tr.optimizer == OptimizerKind::adam);
    CHECK(tr.lr == doctest::Approx(2.0));
    CHECK(tr.dropout == doctest::Approx(0.1));
    CHECK(tr.schedule == Schedule::inverse_sqrt);
    const auto tm = ModelConfig::transformer_defaults();
    CHECK(tm.heads == 8);
    CHECK(tm.hidden == 512);
    CHECK(tm.layers == 6);
    CHECK_NOTHROW(tm.validate());
    auto bad = tiny(Architecture::transformer);
    bad.heads = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("config key round trip") {
    auto m = tiny(Architecture::transformer);
    CHECK(model_config_from(to_kv(m)) == m);
    auto t = TrainConfig::transformer_defaults();
    t.seed = 12;
    CHECK(train_config_from(to_kv(t)) == t);
  }

  TEST_CASE("elementwise and matrix op gradients") {
    std::mt19937_64 rng(1);
    const MatD a = random_mat(3, 4, rng), b = random_mat(3, 4, rng), c = random_mat(4, 2, rng);
    const MatD col = random_mat(3, 1, rng), w = random_mat(1, 4, rng), d = random_mat(3, 2, rng);
    using Xs = std::vector<Var<double>>;
    CHECK(op_error({a, c}, [](auto&, Xs& x) { return matmul(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a, d}, [](auto&, Xs& x) { return matmul_tn(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a, b}, [](auto&, Xs& x) { return add(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a, col}, [](auto&, Xs& x) { return add(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a, b, a}, [](auto&, Xs& x) { return add_n(x); }) <= 1e-7);
    CHECK(op_error({a, b}, [](auto&, Xs& x) { return sub(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a, b}, [](auto&, Xs& x) { return cwise_mul(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return scale(x[0], 0.3); }) <= 1e-7);
    CHECK(op_error({a, w}, [](auto&, Xs& x) { return scale_cols(x[0], x[1]); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return sigmoid(x[0]); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return tanh(x[0]); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return relu(x[0]); }) <= 1e-7);
    CHECK(op_error({a, b}, [](auto&, Xs& x) { return concat_rows(x); }) <= 1e-7);
    CHECK(op_error({a, b}, [](auto&, Xs& x) { return concat_cols(x); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return slice_rows(x[0], 1, 2); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return slice_cols(x[0], 1, 2); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) { return softmax_cols(x[0]); }) <= 1e-6);
    CHECK(op_error({a}, [](auto&, Xs& x) { return log_softmax_cols(x[0]); }) <= 1e-6);
    CHECK(op_error({a, col, col}, [](auto&, Xs& x) { return layer_norm(x[0], x[1], x[2]); }) <= 1e-5);
    CHECK(op_error({a}, [](auto&, Xs& x) { return sum(x[0]); }) <= 1e-7);
    CHECK(op_error({a}, [](auto&, Xs& x) {
            return cross_entropy(x[0], std::vector<int>{0, 2, -1, 1}, -1);
          }) <= 1e-6);
  }

  TEST_CASE("embedding lookup gradient") {
    std::mt19937_64 rng(2);
    ParameterStore<double> st;
    auto& table = st.make("emb", 3, 5);
    randomize(st.all(), rng);
    const auto r = grad_check(st.all(), [&](Graph<double>& g) {
      return probe(g, lookup(g, table, std::vector<int>{1, 3, 1, 0}), 5);
    });
    CHECK(r.max_relative_error <= 1e-7);
  }

  TEST_CASE("linear layer gradient") {
    std::mt19937_64 rng(3);
    ParameterStore<double> st;
    const auto lin = make_linear(st, "lin", 3, 4);
    randomize(st.all(), rng);
    const MatD x = random_mat(4, 2, rng);
    const auto r = grad_check(st.all(), [&](Graph<double>& g) {
      return probe(g, apply(g, lin, g.constant(x)), 6);
    });
    CHECK(r.max_relative_error <= 1e-7);
    CHECK(r.checked == 15);
  }

  TEST_CASE("LSTM cell gradient, dim 3, seed 1") {
    std::mt19937_64 rng(1);
    ParameterStore<double> st;
    const auto cell = make_lstm(st, "lstm", 3, 3);
    randomize(st.all(), rng);
    const MatD x1 = random_mat(3, 2, rng), x2 = random_mat(3, 2, rng), h0 = random_mat(3, 2, rng),
               c0 = random_mat(3, 2, rng);
    const auto r = grad_check(st.all(), [&](Graph<double>& g) {
      LstmState<double> s{g.constant(h0), g.constant(c0)};
      s = lstm_step(g, cell, g.constant(x1), s);
      s = lstm_step(g, cell, g.constant(x2), s);
      return add(probe(g, s.h, 7), probe(g, s.c, 8));
    });
    CHECK(r.max_relative_error <= 1e-5);
  }

  TEST_CASE("additive attention gradient") {
    std::mt19937_64 rng(4);
    ParameterStore<double> st;
    const auto att = make_additive_attention(st, "att", 3, 4, 5);
    randomize(st.all(), rng);
    const MatD q = random_mat(4, 1, rng);
    std::vector<MatD> keys, values;
    for (int j = 0; j < 3; ++j) {
      keys.push_back(random_mat(5, 1, rng));
      values.push_back(random_mat(5, 1, rng));
    }
    const auto r = grad_check(st.all(), [&](Graph<double>& g) {
      std::vector<Var<double>> k, v;
      for (const auto& m : keys) k.push_back(g.constant(m));
      for (const auto& m : values) v.push_back(g.constant(m));
      const auto res = additive_attention(g, att, g.constant(q), project_keys(g, att, k), v);
      return add(probe(g, res.context, 9), probe(g, res.weights, 10));
    });
    CHECK(r.max_relative_error <= 1e-5);
  }

  TEST_CASE("multi-head attention, feed-forward and layer norm gradients") {
    std::mt19937_64 rng(5);
    const MatD xq = random_mat(4, 3, rng), xm = random_mat(4, 2, rng);
    {
      ParameterStore<double> st;
      const auto mha = make_multi_head_attention(st, "mha", 4, 2);
      randomize(st.all(), rng);
      for (bool causal : {false, true}) {
        const auto r = grad_check(st.all(), [&](Graph<double>& g) {
          return probe(g, multi_head_attention(g, mha, g.constant(xq),
                                               causal ? g.constant(xq) : g.constant(xm), causal),
                       11);
        });
        CHECK(r.max_relative_error <= 1e-5);
      }
    }
    {
      ParameterStore<double> st;
      const auto ff = make_feed_forward(st, "ff", 4, 8);
      randomize(st.all(), rng);
      const auto r = grad_check(st.all(), [&](Graph<double>& g) {
        return probe(g, apply(g, ff, g.constant(xq)), 12);
      });
      CHECK(r.max_relative_error <= 1e-5);
    }
    {
      ParameterStore<double> st;
      const auto ln = make_layer_norm(st, "ln", 4);
      randomize(st.all(), rng);
      const auto r = grad_check(st.all(), [&](Graph<double>& g) {
        return probe(g, apply(g, ln, g.constant(xq)), 13);
      });
      CHECK(r.max_relative_error <= 1e-5);
    }
  }

  TEST_CASE("whole-model gradients including embeddings and output projection") {
    const auto batch = tiny_batch();
    std::vector<const Example*> ptrs{&batch[0], &batch[1]};
    for (auto arch : {Architecture::rnn, Architecture::transformer}) {
      for (bool tie : {true, false}) {
        CAPTURE(to_string(arch));
        CAPTURE(tie);
        auto cfg = tiny(arch);
        cfg.tie_output = tie;
        auto model = make_model<double>(cfg, 7, 7);
        std::mt19937_64 rng(6);
        randomize(model->parameters(), rng, 1.0);
        const auto r = grad_check(model->parameters(), [&](Graph<double>& g) {
          std::mt19937_64 r2(0);
          int tokens = 0;
          return model->loss(g, ptrs, false, 0.0, r2, &tokens);
        });
        CAPTURE(r.worst);
        CHECK(r.max_relative_error <= 1e-5);
      }
    }
  }

  TEST_CASE("relative error") {
    MatD a(1, 2), n(1, 2);
    a << 1.0, -2.0;
    n << 1.0, -1.9;
    CHECK(relative_error(a, n) == doctest::Approx(0.05));
    CHECK(relative_error(MatD::Zero(2, 2), MatD::Zero(2, 2)) == 0.0);
    CHECK(relative_error(MatD::Zero(1, 1), MatD::Constant(1, 1, 1e-10)) <= 1e-6);
    CHECK_THROWS(relative_error(a, MatD::Zero(2, 1)));
  }

  TEST_CASE("finite differences reject a zero epsilon") {
    MatD x = MatD::Ones(1, 1);
    CHECK_THROWS(numeric_gradient(x, [] { return 0.0; }, 0.0));
    CHECK_THROWS(grad_check({}, [](Graph<double>& g) { return g.constant(MatD::Zero(1, 1)); }, 0.0));
  }

  TEST_CASE("LSTM at zero parameters and single-step evaluation") {
    std::mt19937_64 rng(7);
    ParameterStore<double> st;
    const auto cell = make_lstm(st, "lstm", 3, 2);
    Graph<double> g;
    const MatD x = random_mat(2, 1, rng), c0 = random_mat(3, 1, rng);
    auto s = lstm_step(g, cell, g.constant(x), {g.constant(MatD::Zero(3, 1)), g.constant(c0)});
    // Gates 0.5, candidate 0: c' = c / 2, h' = tanh(c') / 2.
    CHECK(s.c.value().isApprox(0.5 * c0));
    CHECK(s.h.value().isApprox(0.5 * (0.5 * c0).array().tanh().matrix()));

    randomize(st.all(), rng);
    const MatD h0 = random_mat(3, 1, rng);
    Graph<double> g2;
    s = lstm_step(g2, cell, g2.constant(x), {g2.constant(h0), g2.constant(c0)});
    const VecD pre = cell.W->value * x + cell.U->value * h0 + cell.b->value;
    auto sig = [](const VecD& v) { return (1.0 / (1.0 + (-v.array()).exp())).matrix().eval(); };
    const VecD i = sig(pre.segment(0, 3)), f = sig(pre.segment(3, 3)),
               gg = pre.segment(6, 3).array().tanh().matrix(), o = sig(pre.segment(9, 3));
    const VecD c = f.cwiseProduct(c0) + i.cwiseProduct(gg);
    CHECK(s.c.value().col(0).isApprox(c, 1e-12));
    CHECK(s.h.value().col(0).isApprox(o.cwiseProduct(c.array().tanh().matrix()), 1e-12));
  }

  TEST_CASE("RNN encoder shapes and residual identity") {
    std::mt19937_64 rng(8);
    auto cfg = tiny(Architecture::rnn);
    cfg.layers = 3;
    RnnModel<double> model(cfg, 9, 9);
    randomize(model.parameters(), rng);
    for (int l = 1; l < cfg.layers; ++l) {
      for (bool bwd : {false, true}) {
        const auto& c = model.encoder_cell(l, bwd);
        for (auto* p : {c.W, c.U, c.b}) p->value.setZero();
      }
    }
    const std::vector<int> src{4, 7, 5, 8};
    const auto st = model.encoder_states(src);
    REQUIRE(st.forward.size() == 3);
    CHECK(st.forward[0].rows() == 4);
    CHECK(st.forward[0].cols() == 4);
    CHECK(!st.forward[0].isZero());
    for (int l = 1; l < 3; ++l) {
      CHECK(st.forward[l] == st.forward[l - 1]);
      CHECK(st.backward[l] == st.backward[l - 1]);
    }
    CHECK_THROWS(model.encoder_states({}));
  }

  TEST_CASE("full-size RNN state shape") {
    RnnModel<float> model(ModelConfig::rnn_defaults(), 8, 8);
    std::mt19937_64 rng(1);
    model.initialize(rng);
    const auto st = model.encoder_states({4, 5, 6});
    CHECK(st.forward[0].rows() == 500);
    CHECK(st.forward[0].cols() == 3);
    CHECK(st.backward[1].rows() == 500);
  }

  TEST_CASE("Transformer residual identity with zeroed sublayers") {
    std::mt19937_64 rng(9);
    auto cfg = tiny(Architecture::transformer);
    cfg.layers = 3;
    TransformerModel<double> model(cfg, 9, 9);
    randomize(model.parameters(), rng);
    for (const auto& layer : model.encoder_layers()) {
      for (const auto* lin : {&layer.self.q, &layer.self.k, &layer.self.v, &layer.self.o,
                              &layer.ff.in, &layer.ff.out}) {
        lin->W->value.setZero();
        if (lin->b) lin->b->value.setZero();
      }
    }
    const std::vector<int> src{4, 7, 5};
    const auto st = model.encoder_states(src);
    REQUIRE(st.size() == 4);
    for (int l = 1; l < 4; ++l) CHECK(st[l] == st[l - 1]);
    // h^0 = W E_x + e_pos.
    const auto* w = model.store().find("enc.in.W");
    REQUIRE(w);
    MatD emb(cfg.emb_dim, 3);
    for (int t = 0; t < 3; ++t) emb.col(t) = model.src_embedding().value.col(src[t]);
    const MatD h0 = w->value * emb + sinusoidal_positions<double>(cfg.hidden, 3);
    CHECK(st[0].isApprox(h0, 1e-12));
  }

  TEST_CASE("sinusoidal positions") {
    const auto pe = sinusoidal_positions<double>(4, 3);
    CHECK(pe(0, 0) == doctest::Approx(0.0));
    CHECK(pe(1, 0) == doctest::Approx(1.0));
    CHECK(pe(0, 2) == doctest::Approx(std::sin(2.0)));
    CHECK(pe(3, 1) == doctest::Approx(std::cos(1.0 / 100.0)));
  }

  TEST_CASE("additive attention examples") {
    std::mt19937_64 rng(10);
    ParameterStore<double> st;
    const auto att = make_additive_attention(st, "att", 3, 2, 2);
    randomize(st.all(), rng);
    Graph<double> g;
    const auto q = g.constant(random_mat(2, 1, rng));
    std::vector<Var<double>> keys, values;
    std::vector<MatD> key_m;
    for (int j = 0; j < 4; ++j) {
      key_m.push_back(random_mat(2, 1, rng));
      keys.push_back(g.constant(key_m.back()));
      values.push_back(g.constant(random_mat(2, 1, rng)));
    }
    // One position: weight exactly 1.
    auto one = additive_attention(g, att, q, project_keys(g, att, {keys[0]}), {values[0]});
    CHECK(one.weights.value()(0, 0) == 1.0);

    // Three positions against a direct exp / normalize.
    std::vector<Var<double>> k3(keys.begin(), keys.begin() + 3), v3(values.begin(), values.begin() + 3);
    auto three = additive_attention(g, att, q, project_keys(g, att, k3), v3);
    VecD scores(3);
    for (int j = 0; j < 3; ++j) {
      const VecD hid = (att.Wq->value * q.value() + att.Wk->value * key_m[j]).array().tanh();
      scores(j) = (att.v->value * hid)(0, 0);
    }
    const VecD expect = scores.array().exp() / scores.array().exp().sum();
    CHECK(three.weights.value().col(0).isApprox(expect, 1e-12));
    VecD ctx = VecD::Zero(2);
    for (int j = 0; j < 3; ++j) ctx += expect(j) * v3[j].value().col(0);
    CHECK(three.context.value().col(0).isApprox(ctx, 1e-12));

    // Uniform scores.
    att.v->value.setZero();
    auto four = additive_attention(g, att, q, project_keys(g, att, keys), values);
    for (int j = 0; j < 4; ++j) CHECK(four.weights.value()(j, 0) == doctest::Approx(0.25));
  }

  TEST_CASE("single-token self-attention is the value path") {
    std::mt19937_64 rng(11);
    ParameterStore<double> st;
    const auto mha = make_multi_head_attention(st, "mha", 4, 2);
    randomize(st.all(), rng);
    Graph<double> g;
    const auto x = g.constant(random_mat(4, 1, rng));
    MatD w;
    const auto out = multi_head_attention(g, mha, x, x, false, &w);
    const auto expect = apply(g, mha.o, apply(g, mha.v, x));
    CHECK(out.value().isApprox(expect.value(), 1e-12));
    CHECK(w(0, 0) == doctest::Approx(1.0));
  }

  TEST_CASE("attention distributions sum to one") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      ParameterStore<double> st;
      const auto mha = make_multi_head_attention(st, "mha", 4, 2);
      randomize(st.all(), rng, 2.0);
      Graph<double> g;
      MatD w;
      multi_head_attention(g, mha, g.constant(random_mat(4, 5, rng, 3)),
                           g.constant(random_mat(4, 3, rng, 3)), false, &w);
      for (Eigen::Index c = 0; c < w.cols(); ++c) CHECK(std::abs(w.col(c).sum() - 1) <= 1e-6);
      multi_head_attention(g, mha, g.constant(random_mat(4, 5, rng, 3)),
                           g.constant(random_mat(4, 5, rng, 3)), true, &w);
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        CHECK(std::abs(w.col(c).sum() - 1) <= 1e-6);
        for (Eigen::Index r = c + 1; r < w.rows(); ++r) CHECK(w(r, c) == 0.0);
      }
    }
    for (auto arch : {Architecture::rnn, Architecture::transformer}) {
      auto model = make_model<double>(tiny(arch), 9, 9);
      std::mt19937_64 r(13);
      model->initialize(r);
      auto session = model->start({4, 5, 6, 7});
      auto out = session->step({tok::Vocabulary::kBos});
      CHECK(std::abs(out.attention.col(0).sum() - 1) <= 1e-6);
      CHECK(std::abs(out.log_probs.col(0).array().exp().sum() - 1) <= 1e-6);
    }
  }

  TEST_CASE("decoder is causal") {
    std::mt19937_64 rng(14);
    TransformerModel<double> model(tiny(Architecture::transformer), 9, 9);
    randomize(model.parameters(), rng);
    const std::vector<int> src{4, 5, 6};
    const std::vector<int> prefix{5, 6, 7, 8};
    const MatD base = model.decoder_log_probs(src, prefix);
    for (std::size_t j = 0; j < prefix.size(); ++j) {
      auto changed = prefix;
      changed[j] = changed[j] == 4 ? 5 : 4;
      const MatD other = model.decoder_log_probs(src, changed);
      for (Eigen::Index t = 0; t <= static_cast<Eigen::Index>(j); ++t) {
        CHECK(other.col(t) == base.col(t));
      }
      CHECK(other.col(static_cast<Eigen::Index>(j) + 1) != base.col(static_cast<Eigen::Index>(j) + 1));
    }
  }

  TEST_CASE("beam 1 equals greedy on random models") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
      const auto arch = trial % 2 ? Architecture::transformer : Architecture::rnn;
      auto model = make_model<float>(tiny(arch), 10, 10);
      std::mt19937_64 init(static_cast<std::uint64_t>(trial));
      model->initialize(init);
      for (auto* p : model->parameters()) p->value *= 10.0f;
      std::vector<int> src;
      const int n = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) src.push_back(4 + static_cast<int>(rng() % 6));
      auto s1 = model->start(src);
      const auto greedy = greedy_decode(*s1, 12);
      auto s2 = model->start(src);
      const auto beam = beam_search(*s2, 1, 12);
      REQUIRE(beam.size() == 1);
      CHECK(beam[0].tokens == greedy.tokens);
      CHECK(beam[0].log_prob == doctest::Approx(greedy.log_prob));
    }
  }

  TEST_CASE("beam 2 finds the best joint path of a two-step model") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
      TwoStepAdapter session;
      session.s.p1a = trial == 0 ? 0.6 : u(rng);
      session.s.p2a_given[0] = trial == 0 ? 0.5 : u(rng);
      session.s.p2a_given[1] = trial == 0 ? 0.9 : u(rng);
      // Exhaustive enumeration.
      double best = -1;
      std::vector<int> best_path;
      for (int t1 : {4, 5}) {
        for (int t2 : {4, 5}) {
          const double p1 = t1 == 4 ? session.s.p1a : 1 - session.s.p1a;
          const double pa = session.s.p2a_given[t1 == 4 ? 0 : 1];
          const double p = p1 * (t2 == 4 ? pa : 1 - pa);
          if (p > best) {
            best = p;
            best_path = {t1, t2};
          }
        }
      }
      const auto hyps = beam_search(session, 2, 5);
      REQUIRE(!hyps.empty());
      CHECK(hyps[0].tokens == best_path);
      CHECK(hyps[0].log_prob == doctest::Approx(std::log(best)));
      CHECK(hyps[0].finished);
      if (trial == 0) CHECK(best_path == std::vector<int>{5, 4});
    }
    TwoStepAdapter s;
    s.s.p1a = 0.5;
    CHECK_THROWS(beam_search(s, 0, 5));
  }

  TEST_CASE("hypothesis log-prob is the sum of its steps") {
    auto model = make_model<float>(tiny(Architecture::rnn), 9, 9);
    std::mt19937_64 r(17);
    model->initialize(r);
    auto session = model->start({4, 5, 6});
    for (const auto& h : beam_search(*session, 5, 10)) {
      double s = 0;
      for (double v : h.step_log_probs) s += v;
      CHECK(h.log_prob == doctest::Approx(s));
      CHECK(h.score == doctest::Approx(s / static_cast<double>(h.step_log_probs.size())));
      for (const auto& a : h.attention) {
        double t = 0;
        for (double v : a) t += v;
        CHECK(std::abs(t - 1) <= 1e-6);
      }
    }
  }

  TEST_CASE("zero epochs leave the parameters untouched") {
    auto model = make_model<float>(tiny(Architecture::rnn), 9, 9);
    std::mt19937_64 r(18);
    model->initialize(r);
    const auto before = snapshot(*model);
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto batch = tiny_batch();
    const auto stats = train(*model, std::span<const Example>(batch), cfg);
    CHECK(stats.updates == 0);
    CHECK(snapshot(*model) == before);
  }

  TEST_CASE("copy task") {
    std::mt19937_64 rng(7);
    std::vector<Example> corpus;
    for (int i = 0; i < 50; ++i) {
      Example e;
      const int n = 2 + static_cast<int>(rng() % 4);
      for (int k = 0; k < n; ++k) e.src.push_back(4 + static_cast<int>(rng() % 8));
      e.tgt = e.src;
      corpus.push_back(e);
    }
    ModelConfig mc = tiny(Architecture::rnn);
    mc.emb_dim = 32;
    mc.hidden = 32;
    mc.layers = 1;
    RnnModel<float> model(mc, 12, 12);
    std::mt19937_64 init(7);
    model.initialize(init);
    TrainConfig tc;
    tc.optimizer = OptimizerKind::adam;
    tc.lr = 0.003;
    tc.dropout = 0.0;
    tc.batch_size = 8;
    tc.epochs = 60;
    tc.seed = 7;
    const auto stats = train(model, std::span<const Example>(corpus), tc);
    REQUIRE(stats.epoch_loss.size() == 60);
    CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
    int exact = 0;
    for (const auto& e : corpus) {
      auto s = model.start(e.src);
      exact += greedy_decode(*s, 10).tokens == e.tgt;
    }
    CHECK(exact >= 45);
  }

  TEST_CASE("training is deterministic and skips long pairs") {
    std::vector<Example> corpus = tiny_batch();
    corpus.push_back({std::vector<int>(20, 4), {5}});
    auto run = [&] {
      auto model = make_model<float>(tiny(Architecture::transformer), 9, 9);
      std::mt19937_64 r(19);
      model->initialize(r);
      TrainConfig tc = TrainConfig::transformer_defaults();
      tc.epochs = 3;
      tc.max_len = 10;
      tc.warmup = 4;
      tc.token_batch = 4;
      tc.seed = 3;
      const auto stats = train(*model, std::span<const Example>(corpus), tc);
      CHECK(stats.skipped == 1);
      return snapshot(*model);
    };
    CHECK(run() == run());
  }

  TEST_CASE("optimizer honours masks") {
    for (auto kind : {OptimizerKind::sgd, OptimizerKind::adam}) {
      Parameter<float> p("p", 2, 2);
      p.value << 1, 2, 3, 4;
      p.grad = Mat<float>::Ones(2, 2);
      p.mask = Mat<float>::Ones(2, 2);
      p.mask(0, 1) = 0;
      TrainConfig tc;
      tc.optimizer = kind;
      tc.lr = 0.1;
      Optimizer<float> opt(tc, 2);
      opt.update({&p});
      CHECK(p.value(0, 1) == 2.0f);
      CHECK(p.value(0, 0) < 1.0f);
      CHECK(opt.steps() == 1);
    }
  }

  TEST_CASE("gradient clipping") {
    Parameter<double> p("p", 1, 2);
    p.grad = MatD(1, 2);
    p.grad << 3, 4;
    CHECK(clip_gradients<double>({&p}, 1.0) == doctest::Approx(5.0));
    CHECK(p.grad.norm() == doctest::Approx(1.0));
  }

  TEST_CASE("learning rate schedules") {
    TrainConfig c;
    c.lr = 0.5;
    CHECK(learning_rate(c, 64, 1000) == 0.5);
    c = TrainConfig::transformer_defaults();
    const double d = 512;
    auto expect = [&](double s) {
      return 2.0 / std::sqrt(d) * std::min(1 / std::sqrt(s), s * std::pow(8000.0, -1.5));
    };
    for (long s : {1L, 100L, 4000L, 8000L, 8001L, 100000L}) {
      CHECK(learning_rate(c, 512, s) == doctest::Approx(expect(static_cast<double>(s))));
    }
    CHECK(learning_rate(c, 512, 8000) > learning_rate(c, 512, 4000));
    CHECK(learning_rate(c, 512, 16000) < learning_rate(c, 512, 8000));
  }

  TEST_CASE("non-finite loss aborts training") {
    auto model = make_model<float>(tiny(Architecture::rnn), 9, 9);
    std::mt19937_64 r(20);
    model->initialize(r);
    model->tgt_embedding().value.setConstant(std::numeric_limits<float>::quiet_NaN());
    TrainConfig tc;
    tc.epochs = 1;
    const auto batch = tiny_batch();
    CHECK_THROWS_AS(train(*model, std::span<const Example>(batch), tc), TrainingError);
  }

  TEST_CASE("checkpoint round trip") {
    test::TempDir dir;
    for (auto arch : {Architecture::rnn, Architecture::transformer}) {
      auto model = make_model<float>(tiny(arch), 9, 11);
      std::mt19937_64 r(21);
      model->initialize(r);
      const std::string path = dir.file("m.ckpt");
      save_checkpoint(path, *model, 123, 456, {{"strategy", "sem_kge"}});
      const auto ck = load_checkpoint<float>(path);
      CHECK(ck.info.model == model->config());
      CHECK(ck.info.src_vocab == 9);
      CHECK(ck.info.tgt_vocab == 11);
      CHECK(ck.info.src_vocab_hash == 123u);
      CHECK(ck.info.tgt_vocab_hash == 456u);
      CHECK(ck.info.meta.at("strategy") == "sem_kge");
      const auto a = model->parameters();
      const auto b = ck.model->parameters();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i]->name == b[i]->name);
        CHECK(a[i]->value == b[i]->value);
      }
      const std::string bytes = read_file(path);
      dir.write("bad.ckpt", "NOTACKPT" + bytes.substr(8));
      CHECK_THROWS_AS(load_checkpoint<float>(dir.file("bad.ckpt")), FormatError);
      dir.write("short.ckpt", bytes.substr(0, bytes.size() - 5));
      CHECK_THROWS_AS(load_checkpoint<float>(dir.file("short.ckpt")), FormatError);
    }
  }

  TEST_CASE("unknown word replacement") {
    kb::BilingualLexicon lex;
    lex.add("cancer", "Krebs");
    const Sentence src{"the", "cancer|dbr_Cancer", "in", "Chad"};
    const std::vector<std::vector<double>> att{{0.1, 0.7, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.7}};
    CHECK(unk_replace(Sentence{"<unk>", "<unk>"}, att, src, &lex, UnkMode::lexicon_then_copy) ==
          Sentence{"Krebs", "Chad"});
    CHECK(unk_replace(Sentence{"<unk>", "<unk>"}, att, src, &lex, UnkMode::copy_only) ==
          Sentence{"cancer", "Chad"});
    CHECK(unk_replace(Sentence{"<unk>", "x"}, att, src, &lex, UnkMode::off) ==
          Sentence{"<unk>", "x"});
    CHECK(unk_replace(Sentence{"der", "Krebs"}, att, src, &lex, UnkMode::lexicon_then_copy) ==
          Sentence{"der", "Krebs"});
    kb::BilingualLexicon multi;
    multi.add("uk", "Vereinigtes Königreich");
    const std::vector<std::vector<double>> one{{1.0}};
    CHECK(unk_replace(Sentence{"<unk>"}, one, Sentence{"UK"}, &multi, UnkMode::lexicon_then_copy) ==
          Sentence{"Vereinigtes", "Königreich"});
    CHECK(parse_unk_mode("copy") == UnkMode::copy_only);
    CHECK_THROWS(parse_unk_mode("sometimes"));
  }
}
