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

#include "compsyn/adam.h"

#include <cmath>

#include "compsyn/errors.h"

namespace compsyn {

void AdamState::Step(std::span<Tensor* const> params,
                     std::span<const Tensor> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam: " + std::to_string(params.size()) +
                     " parameters but " + std::to_string(grads.size()) +
                     " gradients");
  }
  if (first_.empty()) {
    for (const Tensor* p : params) {
      first_.emplace_back(p->rows(), p->cols());
      second_.emplace_back(p->rows(), p->cols());
    }
  }
  if (first_.size() != params.size()) {
    throw ShapeError("adam: parameter count changed between steps");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->SameShape(grads[i]) || !first_[i].SameShape(grads[i])) {
      throw ShapeError("adam: parameter " + std::to_string(i) + " shape " +
                       params[i]->ShapeString() + " vs gradient " +
                       grads[i].ShapeString());
    }
  }

  ++step_;
  const auto& o = options_;
  const double correction1 = 1.0 - std::pow(o.beta1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(o.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    Tensor& m = first_[i];
    Tensor& v = second_[i];
    const Tensor& g = grads[i];
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace compsyn
