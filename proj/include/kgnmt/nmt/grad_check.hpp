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

#ifndef KGNMT_NMT_GRAD_CHECK_HPP_
#define KGNMT_NMT_GRAD_CHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "kgnmt/nmt/graph.hpp"

namespace kgnmt::nmt {

// max_i |a_i - n_i| / max(max_i |a_i|, max_i |n_i|, 1e-4): the worst
// deviation relative to the tensor's gradient scale.
double relative_error(const Mat<double>& analytic, const Mat<double>& numeric);

// Central differences (f(x + e) - f(x - e)) / 2e over every entry of x;
// x is restored. Throws if epsilon <= 0.
Mat<double> numeric_gradient(Mat<double>& x, const std::function<double()>& f, double epsilon);

struct GradCheckResult {
  double max_relative_error = 0;
  std::string worst;        // parameter with the largest error
  std::size_t checked = 0;  // scalars perturbed
};

// Compares reverse-mode gradients of the scalar built by `loss` against
// central differences over every scalar of `params`.
GradCheckResult grad_check(const std::vector<Parameter<double>*>& params,
                           const std::function<Var<double>(Graph<double>&)>& loss,
                           double epsilon = 1e-5);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_GRAD_CHECK_HPP_
