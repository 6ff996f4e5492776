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

#include "kgnmt/nmt/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "kgnmt/common/error.hpp"

namespace kgnmt::nmt {

double relative_error(const Mat<double>& analytic, const Mat<double>& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    throw Error("relative_error: shape mismatch");
  }
  if (analytic.size() == 0) return 0;
  // Some gradients vanish structurally (a key bias under softmax). The floor
  // keeps difference-quotient roundoff on such tensors from reading as error.
  constexpr double kFloor = 1e-4;
  const double scale = std::max({analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff(), kFloor});
  const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
  return diff / scale;
}

Mat<double> numeric_gradient(Mat<double>& x, const std::function<double()>& f, double epsilon) {
  if (!(epsilon > 0)) throw Error("numeric_gradient: epsilon must be positive");
  Mat<double> g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + epsilon;
    const double up = f();
    x.data()[i] = saved - epsilon;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * epsilon);
  }
  return g;
}

GradCheckResult grad_check(const std::vector<Parameter<double>*>& params,
                           const std::function<Var<double>(Graph<double>&)>& loss,
                           double epsilon) {
  if (!(epsilon > 0)) throw Error("grad_check: epsilon must be positive");
  for (auto* p : params) p->zero_grad();
  {
    Graph<double> g;
    g.backward(loss(g));
  }
  auto eval = [&] {
    Graph<double> g;
    return loss(g).value()(0, 0);
  };
  GradCheckResult r;
  for (auto* p : params) {
    const Mat<double> analytic = p->grad;
    const Mat<double> numeric = numeric_gradient(p->value, eval, epsilon);
    const double e = relative_error(analytic, numeric);
    r.checked += static_cast<std::size_t>(p->value.size());
    if (e > r.max_relative_error || r.worst.empty()) {
      if (e >= r.max_relative_error) {
        r.max_relative_error = e;
        r.worst = p->name;
      }
    }
  }
  return r;
}

}  // namespace kgnmt::nmt
