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

#include "kgnmt/nmt/graph.hpp"

#include <cmath>
#include <limits>

#include "kgnmt/common/error.hpp"

namespace kgnmt::nmt {

namespace {

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

template <typename S>
void check_same(Var<S> a, Var<S> b, const char* op) {
  if (a.graph != b.graph) throw Error(std::string(op) + ": variables from different graphs");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(std::string(op) + ": shape mismatch " + shape(a.rows(), a.cols()) + " vs " +
                shape(b.rows(), b.cols()));
  }
}

// Column-wise softmax of `a` into `y`.
template <typename S>
void softmax_into(const Mat<S>& a, Mat<S>& y) {
  y.resize(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const S mx = a.col(j).maxCoeff();
    // Eigen's vectorized exp clamps -inf to a denormal; masked entries must be 0.
    y.col(j) = (a.col(j).array() == -std::numeric_limits<S>::infinity())
                   .select(S(0), (a.col(j).array() - mx).exp());
    y.col(j) /= y.col(j).sum();
  }
}

}  // namespace

template <typename S>
Var<S> Graph<S>::constant(Mat<S> value) {
  return record(std::move(value), false, nullptr);
}

template <typename S>
Var<S> Graph<S>::input(Mat<S> value) {
  return record(std::move(value), true, nullptr);
}

template <typename S>
Var<S> Graph<S>::param(Parameter<S>& p) {
  Node n;
  n.param = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

template <typename S>
Var<S> Graph<S>::record(Mat<S> value, bool requires_grad, Backward backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

template <typename S>
void Graph<S>::set_backward(Var<S> v, Backward backward) {
  nodes_[static_cast<std::size_t>(v.id)].backward = std::move(backward);
}

template <typename S>
const Mat<S>& Graph<S>::value(int id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  return n.param ? n.param->value : n.value;
}

template <typename S>
Mat<S>& Graph<S>::grad(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.param) {
    Parameter<S>& p = *n.param;
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
      p.grad.setZero(p.value.rows(), p.value.cols());
    }
    n.grad_live = true;
    return p.grad;
  }
  if (!n.grad_live) {
    n.grad.setZero(n.value.rows(), n.value.cols());
    n.grad_live = true;
  }
  return n.grad;
}

template <typename S>
bool Graph<S>::has_grad(int id) const {
  return nodes_[static_cast<std::size_t>(id)].grad_live;
}

template <typename S>
void Graph<S>::backward(Var<S> loss) {
  if (loss.graph != this) throw Error("backward: variable belongs to another graph");
  const Mat<S>& v = value(loss.id);
  if (v.rows() != 1 || v.cols() != 1) throw Error("backward: loss must be 1x1");
  if (!requires_grad(loss.id)) return;
  grad(loss.id)(0, 0) += S(1);
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.backward && n.requires_grad && n.grad_live) n.backward();
  }
}

template <typename S>
Var<S> matmul(Var<S> a, Var<S> b) {
  Graph<S>* g = a.graph;
  if (a.cols() != b.rows()) {
    throw Error("matmul: " + shape(a.rows(), a.cols()) + " * " + shape(b.rows(), b.cols()));
  }
  const bool rg = g->requires_grad(a.id) || g->requires_grad(b.id);
  Var<S> y = g->record(a.value() * b.value(), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, ib = b.id, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ia)) g->grad(ia).noalias() += gy * g->value(ib).transpose();
      if (g->requires_grad(ib)) g->grad(ib).noalias() += g->value(ia).transpose() * gy;
    });
  }
  return y;
}

template <typename S>
Var<S> matmul_tn(Var<S> a, Var<S> b) {
  Graph<S>* g = a.graph;
  if (a.rows() != b.rows()) {
    throw Error("matmul_tn: " + shape(a.rows(), a.cols()) + "^T * " + shape(b.rows(), b.cols()));
  }
  const bool rg = g->requires_grad(a.id) || g->requires_grad(b.id);
  Var<S> y = g->record(a.value().transpose() * b.value(), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, ib = b.id, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ia)) g->grad(ia).noalias() += g->value(ib) * gy.transpose();
      if (g->requires_grad(ib)) g->grad(ib).noalias() += g->value(ia) * gy;
    });
  }
  return y;
}

template <typename S>
Var<S> add(Var<S> a, Var<S> b) {
  Graph<S>* g = a.graph;
  const bool broadcast = b.cols() == 1 && a.cols() != 1 && a.rows() == b.rows();
  if (!broadcast) check_same(a, b, "add");
  const bool rg = g->requires_grad(a.id) || g->requires_grad(b.id);
  Mat<S> v = a.value();
  if (broadcast) {
    v.colwise() += b.value().col(0);
  } else {
    v += b.value();
  }
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, ib = b.id, iy = y.id, broadcast] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ia)) g->grad(ia) += gy;
      if (g->requires_grad(ib)) {
        if (broadcast) {
          g->grad(ib).col(0) += gy.rowwise().sum();
        } else {
          g->grad(ib) += gy;
        }
      }
    });
  }
  return y;
}

template <typename S>
Var<S> add_n(const std::vector<Var<S>>& xs) {
  if (xs.empty()) throw Error("add_n: no operands");
  Graph<S>* g = xs.front().graph;
  Mat<S> v = xs.front().value();
  bool rg = g->requires_grad(xs.front().id);
  std::vector<int> ids{xs.front().id};
  for (std::size_t i = 1; i < xs.size(); ++i) {
    check_same(xs.front(), xs[i], "add_n");
    v += xs[i].value();
    rg = rg || g->requires_grad(xs[i].id);
    ids.push_back(xs[i].id);
  }
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ids, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      for (int i : ids) {
        if (g->requires_grad(i)) g->grad(i) += gy;
      }
    });
  }
  return y;
}

template <typename S>
Var<S> sub(Var<S> a, Var<S> b) {
  check_same(a, b, "sub");
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id) || g->requires_grad(b.id);
  Var<S> y = g->record(a.value() - b.value(), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, ib = b.id, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ia)) g->grad(ia) += gy;
      if (g->requires_grad(ib)) g->grad(ib) -= gy;
    });
  }
  return y;
}

template <typename S>
Var<S> cwise_mul(Var<S> a, Var<S> b) {
  check_same(a, b, "cwise_mul");
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id) || g->requires_grad(b.id);
  Var<S> y = g->record(a.value().cwiseProduct(b.value()), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, ib = b.id, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ia)) g->grad(ia) += gy.cwiseProduct(g->value(ib));
      if (g->requires_grad(ib)) g->grad(ib) += gy.cwiseProduct(g->value(ia));
    });
  }
  return y;
}

template <typename S>
Var<S> scale(Var<S> a, S s) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Var<S> y = g->record(a.value() * s, rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id, s] { g->grad(ia) += g->grad(iy) * s; });
  }
  return y;
}

template <typename S>
Var<S> scale_cols(Var<S> a, Var<S> w) {
  Graph<S>* g = a.graph;
  if (w.rows() != 1 || w.cols() != a.cols()) {
    throw Error("scale_cols: weights " + shape(w.rows(), w.cols()) + " for " +
                shape(a.rows(), a.cols()));
  }
  const bool rg = g->requires_grad(a.id) || g->requires_grad(w.id);
  Mat<S> v = a.value() * w.value().row(0).asDiagonal();
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iw = w.id, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ia)) g->grad(ia) += gy * g->value(iw).row(0).asDiagonal();
      if (g->requires_grad(iw)) {
        g->grad(iw).row(0) += gy.cwiseProduct(g->value(ia)).colwise().sum();
      }
    });
  }
  return y;
}

template <typename S>
Var<S> sigmoid(Var<S> a) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Mat<S> v = a.value().unaryExpr([](S x) {
    return x >= 0 ? S(1) / (S(1) + std::exp(-x)) : std::exp(x) / (S(1) + std::exp(x));
  });
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id] {
      const auto& s = g->value(iy).array();
      g->grad(ia).array() += g->grad(iy).array() * s * (S(1) - s);
    });
  }
  return y;
}

template <typename S>
Var<S> tanh(Var<S> a) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Var<S> y = g->record(a.value().array().tanh().matrix(), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id] {
      const auto& t = g->value(iy).array();
      g->grad(ia).array() += g->grad(iy).array() * (S(1) - t * t);
    });
  }
  return y;
}

template <typename S>
Var<S> relu(Var<S> a) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Var<S> y = g->record(a.value().cwiseMax(S(0)), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id] {
      g->grad(ia).array() +=
          (g->value(ia).array() > S(0)).select(g->grad(iy).array(), S(0));
    });
  }
  return y;
}

template <typename S>
Var<S> concat_rows(const std::vector<Var<S>>& xs) {
  if (xs.empty()) throw Error("concat_rows: no operands");
  Graph<S>* g = xs.front().graph;
  Eigen::Index rows = 0;
  bool rg = false;
  for (const auto& x : xs) {
    if (x.cols() != xs.front().cols()) throw Error("concat_rows: column counts differ");
    rows += x.rows();
    rg = rg || g->requires_grad(x.id);
  }
  Mat<S> v(rows, xs.front().cols());
  std::vector<std::pair<int, Eigen::Index>> parts;
  Eigen::Index r = 0;
  for (const auto& x : xs) {
    v.middleRows(r, x.rows()) = x.value();
    parts.emplace_back(x.id, r);
    r += x.rows();
  }
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, parts, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      for (const auto& [id, start] : parts) {
        if (!g->requires_grad(id)) continue;
        Mat<S>& gx = g->grad(id);
        gx += gy.middleRows(start, gx.rows());
      }
    });
  }
  return y;
}

template <typename S>
Var<S> concat_cols(const std::vector<Var<S>>& xs) {
  if (xs.empty()) throw Error("concat_cols: no operands");
  Graph<S>* g = xs.front().graph;
  Eigen::Index cols = 0;
  bool rg = false;
  for (const auto& x : xs) {
    if (x.rows() != xs.front().rows()) throw Error("concat_cols: row counts differ");
    cols += x.cols();
    rg = rg || g->requires_grad(x.id);
  }
  Mat<S> v(xs.front().rows(), cols);
  std::vector<std::pair<int, Eigen::Index>> parts;
  Eigen::Index c = 0;
  for (const auto& x : xs) {
    v.middleCols(c, x.cols()) = x.value();
    parts.emplace_back(x.id, c);
    c += x.cols();
  }
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, parts, iy = y.id] {
      const Mat<S>& gy = g->grad(iy);
      for (const auto& [id, start] : parts) {
        if (!g->requires_grad(id)) continue;
        Mat<S>& gx = g->grad(id);
        gx += gy.middleCols(start, gx.cols());
      }
    });
  }
  return y;
}

template <typename S>
Var<S> slice_rows(Var<S> a, Eigen::Index start, Eigen::Index n) {
  if (start < 0 || n < 0 || start + n > a.rows()) throw Error("slice_rows: out of range");
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Var<S> y = g->record(a.value().middleRows(start, n), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id, start, n] {
      g->grad(ia).middleRows(start, n) += g->grad(iy);
    });
  }
  return y;
}

template <typename S>
Var<S> slice_cols(Var<S> a, Eigen::Index start, Eigen::Index n) {
  if (start < 0 || n < 0 || start + n > a.cols()) throw Error("slice_cols: out of range");
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Var<S> y = g->record(a.value().middleCols(start, n), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id, start, n] {
      g->grad(ia).middleCols(start, n) += g->grad(iy);
    });
  }
  return y;
}

template <typename S>
Var<S> softmax_cols(Var<S> a) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Mat<S> v;
  softmax_into(a.value(), v);
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id] {
      const Mat<S>& p = g->value(iy);
      const Mat<S>& gy = g->grad(iy);
      Mat<S>& gx = g->grad(ia);
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        const S dot = gy.col(j).dot(p.col(j));
        gx.col(j).array() += p.col(j).array() * (gy.col(j).array() - dot);
      }
    });
  }
  return y;
}

template <typename S>
Var<S> log_softmax_cols(Var<S> a) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  const Mat<S>& x = a.value();
  Mat<S> v(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const S mx = x.col(j).maxCoeff();
    const S lse = mx + std::log((x.col(j).array() - mx).exp().sum());
    v.col(j) = x.col(j).array() - lse;
  }
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id] {
      const Mat<S>& ly = g->value(iy);
      const Mat<S>& gy = g->grad(iy);
      Mat<S>& gx = g->grad(ia);
      for (Eigen::Index j = 0; j < ly.cols(); ++j) {
        const S total = gy.col(j).sum();
        gx.col(j).array() += gy.col(j).array() - ly.col(j).array().exp() * total;
      }
    });
  }
  return y;
}

template <typename S>
Var<S> layer_norm(Var<S> x, Var<S> gamma, Var<S> beta, S eps) {
  Graph<S>* g = x.graph;
  const Eigen::Index d = x.rows();
  if (gamma.rows() != d || gamma.cols() != 1 || beta.rows() != d || beta.cols() != 1) {
    throw Error("layer_norm: gain/bias must be " + shape(d, 1));
  }
  const bool rg =
      g->requires_grad(x.id) || g->requires_grad(gamma.id) || g->requires_grad(beta.id);
  const Mat<S>& xv = x.value();
  Mat<S> xhat(d, xv.cols());
  Vec<S> inv_std(xv.cols());
  for (Eigen::Index j = 0; j < xv.cols(); ++j) {
    const S mu = xv.col(j).mean();
    const S var = (xv.col(j).array() - mu).square().mean();
    inv_std[j] = S(1) / std::sqrt(var + eps);
    xhat.col(j) = (xv.col(j).array() - mu) * inv_std[j];
  }
  Mat<S> v = (xhat.array().colwise() * gamma.value().col(0).array()).matrix();
  v.colwise() += beta.value().col(0);
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ix = x.id, ig = gamma.id, ib = beta.id, iy = y.id,
                        xhat = std::move(xhat), inv_std = std::move(inv_std)] {
      const Mat<S>& gy = g->grad(iy);
      if (g->requires_grad(ib)) g->grad(ib).col(0) += gy.rowwise().sum();
      if (g->requires_grad(ig)) g->grad(ig).col(0) += gy.cwiseProduct(xhat).rowwise().sum();
      if (g->requires_grad(ix)) {
        const auto gam = g->value(ig).col(0).array();
        Mat<S>& gx = g->grad(ix);
        const S n = static_cast<S>(xhat.rows());
        for (Eigen::Index j = 0; j < xhat.cols(); ++j) {
          const auto dxhat = (gy.col(j).array() * gam).eval();
          const S s1 = dxhat.sum();
          const S s2 = (dxhat * xhat.col(j).array()).sum();
          gx.col(j).array() +=
              (inv_std[j] / n) * (n * dxhat - s1 - xhat.col(j).array() * s2);
        }
      }
    });
  }
  return y;
}

template <typename S>
Var<S> sum(Var<S> a) {
  Graph<S>* g = a.graph;
  const bool rg = g->requires_grad(a.id);
  Mat<S> v(1, 1);
  v(0, 0) = a.value().sum();
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ia = a.id, iy = y.id] {
      g->grad(ia).array() += g->grad(iy)(0, 0);
    });
  }
  return y;
}

template <typename S>
Var<S> lookup(Graph<S>& g, Parameter<S>& table, const std::vector<int>& ids) {
  const Eigen::Index n = table.value.cols();
  Mat<S> v(table.value.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] < 0 || ids[j] >= n) {
      throw Error("lookup: id " + std::to_string(ids[j]) + " outside table of " +
                  std::to_string(n) + " (" + table.name + ")");
    }
    v.col(static_cast<Eigen::Index>(j)) = table.value.col(ids[j]);
  }
  Var<S> y = g.record(std::move(v), true);
  Var<S> p = g.param(table);
  // The parameter node precedes nothing that reads it; gradients are
  // scattered straight into it.
  g.set_backward(y, [gp = &g, ip = p.id, iy = y.id, ids] {
    const Mat<S>& gy = gp->grad(iy);
    Mat<S>& gt = gp->grad(ip);
    for (std::size_t j = 0; j < ids.size(); ++j) gt.col(ids[j]) += gy.col(static_cast<Eigen::Index>(j));
  });
  return y;
}

template <typename S>
Var<S> cross_entropy(Var<S> logits, const std::vector<int>& targets, int ignore) {
  Graph<S>* g = logits.graph;
  const Mat<S>& x = logits.value();
  if (static_cast<Eigen::Index>(targets.size()) != x.cols()) {
    throw Error("cross_entropy: " + std::to_string(targets.size()) + " targets for " +
                std::to_string(x.cols()) + " columns");
  }
  Mat<S> probs;
  softmax_into(x, probs);
  S loss = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const int t = targets[static_cast<std::size_t>(j)];
    if (t == ignore) continue;
    if (t < 0 || t >= x.rows()) throw Error("cross_entropy: target out of range");
    const S mx = x.col(j).maxCoeff();
    const S lse = mx + std::log((x.col(j).array() - mx).exp().sum());
    loss += lse - x(t, j);
  }
  const bool rg = g->requires_grad(logits.id);
  Mat<S> v(1, 1);
  v(0, 0) = loss;
  Var<S> y = g->record(std::move(v), rg);
  if (rg) {
    g->set_backward(y, [g, ix = logits.id, iy = y.id, targets, ignore,
                        probs = std::move(probs)] {
      const S gy = g->grad(iy)(0, 0);
      Mat<S>& gx = g->grad(ix);
      for (Eigen::Index j = 0; j < probs.cols(); ++j) {
        const int t = targets[static_cast<std::size_t>(j)];
        if (t == ignore) continue;
        gx.col(j) += gy * probs.col(j);
        gx(t, j) -= gy;
      }
    });
  }
  return y;
}

template <typename S>
Var<S> dropout(Var<S> x, S p, std::mt19937_64& rng) {
  if (p <= S(0)) return x;
  if (p >= S(1)) throw Error("dropout: probability must be < 1");
  std::bernoulli_distribution keep(1.0 - static_cast<double>(p));
  Mat<S> mask(x.rows(), x.cols());
  const S s = S(1) / (S(1) - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? s : S(0);
  return cwise_mul(x, x.graph->constant(std::move(mask)));
}

#define KGNMT_INSTANTIATE(S)                                                              \
  template class Graph<S>;                                                                \
  template Var<S> matmul(Var<S>, Var<S>);                                                 \
  template Var<S> matmul_tn(Var<S>, Var<S>);                                              \
  template Var<S> add(Var<S>, Var<S>);                                                    \
  template Var<S> add_n(const std::vector<Var<S>>&);                                      \
  template Var<S> sub(Var<S>, Var<S>);                                                    \
  template Var<S> cwise_mul(Var<S>, Var<S>);                                              \
  template Var<S> scale(Var<S>, S);                                                       \
  template Var<S> scale_cols(Var<S>, Var<S>);                                             \
  template Var<S> sigmoid(Var<S>);                                                        \
  template Var<S> tanh(Var<S>);                                                           \
  template Var<S> relu(Var<S>);                                                           \
  template Var<S> concat_rows(const std::vector<Var<S>>&);                                \
  template Var<S> concat_cols(const std::vector<Var<S>>&);                                \
  template Var<S> slice_rows(Var<S>, Eigen::Index, Eigen::Index);                         \
  template Var<S> slice_cols(Var<S>, Eigen::Index, Eigen::Index);                         \
  template Var<S> softmax_cols(Var<S>);                                                   \
  template Var<S> log_softmax_cols(Var<S>);                                               \
  template Var<S> layer_norm(Var<S>, Var<S>, Var<S>, S);                                  \
  template Var<S> sum(Var<S>);                                                            \
  template Var<S> lookup(Graph<S>&, Parameter<S>&, const std::vector<int>&);              \
  template Var<S> cross_entropy(Var<S>, const std::vector<int>&, int);                    \
  template Var<S> dropout(Var<S>, S, std::mt19937_64&);

KGNMT_INSTANTIATE(float)
KGNMT_INSTANTIATE(double)

#undef KGNMT_INSTANTIATE

}  // namespace kgnmt::nmt
