// Copyright 2026 The compsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only oracles shared by the unit and acceptance suites. Nothing here
// calls into the autodiff tape, so gradients computed with it are an
// independent check of the reverse-mode path.

#ifndef COMPSYN_TESTS_ORACLES_H_
#define COMPSYN_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "compsyn/random.h"
#include "compsyn/tensor.h"

namespace compsyn::testing {

inline Tensor RandomTensor(size_t rows, size_t cols, SplitMix64& rng,
                           double lo = -1.0, double hi = 1.0) {
  Tensor t(rows, cols);
  for (double& x : t.storage()) x = rng.Uniform(lo, hi);
  return t;
}

// k-outer accumulation order, deliberately different from the library.
inline Tensor NaiveMatmul(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), b.cols());
  for (size_t k = 0; k < a.cols(); ++k)
    for (size_t i = 0; i < a.rows(); ++i)
      for (size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

using ScalarFn = std::function<double(const std::vector<Tensor>&)>;

// Central differences of f with respect to input `which`.
inline Tensor FiniteDifferenceGradient(const ScalarFn& f, std::vector<Tensor> inputs,
                                       size_t which, double h = 1e-5) {
  Tensor grad(inputs[which].rows(), inputs[which].cols());
  for (size_t i = 0; i < grad.size(); ++i) {
    const double saved = inputs[which][i];
    inputs[which][i] = saved + h;
    const double up = f(inputs);
    inputs[which][i] = saved - h;
    const double down = f(inputs);
    inputs[which][i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double RelativeError(const Tensor& a, const Tensor& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  if (scale < 1e-10) return std::sqrt(diff);
  return std::sqrt(diff) / scale;
}

}  // namespace compsyn::testing

#endif  // COMPSYN_TESTS_ORACLES_H_
