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

#ifndef COMPSYN_ADAM_H_
#define COMPSYN_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "compsyn/tensor.h"

namespace compsyn {

struct AdamOptions {
  double learning_rate = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction and no weight decay.
class AdamState {
 public:
  explicit AdamState(AdamOptions options = {}) : options_(options) {}

  // Applies one update in place. The first call fixes the parameter layout;
  // later calls must pass tensors of the same shapes in the same order.
  void Step(std::span<Tensor* const> params, std::span<const Tensor> grads);

  const AdamOptions& options() const { return options_; }
  int64_t step_count() const { return step_; }
  const std::vector<Tensor>& first_moment() const { return first_; }
  const std::vector<Tensor>& second_moment() const { return second_; }

 private:
  AdamOptions options_;
  int64_t step_ = 0;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

}  // namespace compsyn

#endif  // COMPSYN_ADAM_H_
