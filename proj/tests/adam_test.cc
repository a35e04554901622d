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

#include <cmath>

#include "doctest.h"

#include "compsyn/adam.h"
#include "compsyn/autodiff.h"
#include "compsyn/errors.h"

using namespace compsyn;

TEST_CASE("zero gradient leaves parameters unchanged") {
  AdamState adam({.learning_rate = 0.1});
  Tensor w = Tensor::Row({1.0, -2.0});
  Tensor* params[] = {&w};
  const Tensor grads[] = {Tensor(1, 2)};
  for (int i = 0; i < 5; ++i) adam.Step(params, grads);
  CHECK(w == Tensor::Row({1.0, -2.0}));
  CHECK(adam.step_count() == 5);
}

TEST_CASE("first step on w^2 moves by about the learning rate") {
  AdamState adam({.learning_rate = 0.1});
  Tensor w = Tensor::Row({1.0});
  Tensor* params[] = {&w};
  const Tensor grads[] = {Tensor::Row({2.0 * w[0]})};
  adam.Step(params, grads);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  CHECK(w[0] == doctest::Approx(1.0 - 0.1 * 2.0 / (2.0 + 1e-8)).epsilon(1e-15));
  CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-7));
}

TEST_CASE("loss on a convex quadratic decreases monotonically") {
  // f(w) = mse(w A, t) with A well conditioned.
  AdamState adam({.learning_rate = 1e-2});
  Tensor w = Tensor::Row({2.0, -1.0, 0.5});
  const Tensor a = Tensor::FromRows({{1.0, 0.2, 0.0}, {0.0, 1.0, 0.1}, {0.3, 0.0, 1.0}});
  const Tensor target = Tensor::Row({0.1, 0.2, -0.3});
  double previous = 1e300;
  for (int step = 0; step < 100; ++step) {
    ad::Tape tape;
    const ad::Var wv = tape.Leaf(w);
    const ad::Var loss = ad::mse(ad::matmul(wv, tape.Leaf(a)), tape.Leaf(target));
    CHECK(loss.value()[0] < previous);
    previous = loss.value()[0];
    tape.Backward(loss);
    Tensor* params[] = {&w};
    const Tensor grads[] = {wv.grad()};
    adam.Step(params, grads);
  }
}

TEST_CASE("adam rejects shape mismatches") {
  AdamState adam;
  Tensor w = Tensor::Row({1.0, 2.0});
  Tensor* params[] = {&w};
  const Tensor grads[] = {Tensor::Row({1.0})};
  CHECK_THROWS_AS(adam.Step(params, grads), ShapeError);
}

TEST_CASE("adam is deterministic") {
  auto run = [] {
    AdamState adam({.learning_rate = 0.05});
    Tensor w = Tensor::Row({0.7, -0.4});
    for (int i = 0; i < 20; ++i) {
      Tensor* params[] = {&w};
      const Tensor grads[] = {Tensor::Row({std::sin(w[0]), w[1] * w[1]})};
      adam.Step(params, grads);
    }
    return w;
  };
  CHECK(run() == run());
}
