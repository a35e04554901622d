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

#include "compsyn/errors.h"
#include "compsyn/tensor.h"
#include "oracles.h"

using namespace compsyn;
using compsyn::testing::NaiveMatmul;
using compsyn::testing::RandomTensor;

TEST_CASE("matmul identity and hand example") {
  const Tensor a = Tensor::FromRows({{1.5, -2.0}, {0.25, 4.0}});
  CHECK(matmul(Tensor::Identity(2), a) == a);

  const Tensor half = Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}});
  const Tensor got = matmul(matmul(half, Tensor::Identity(2)), transpose(half));
  CHECK(got == Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(max_abs_diff(got, NaiveMatmul(NaiveMatmul(half, Tensor::Identity(2)), transpose(half))) == 0.0);
}

TEST_CASE("matmul agrees with naive loop on random pairs") {
  SplitMix64 rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor a = RandomTensor(5, 7, rng);
    const Tensor b = RandomTensor(7, 3, rng);
    worst = std::max(worst, max_abs_diff(matmul(a, b), NaiveMatmul(a, b)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("matmul associativity and transpose identity") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = RandomTensor(4, 4, rng), b = RandomTensor(4, 4, rng),
                 c = RandomTensor(4, 4, rng);
    CHECK(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) < 1e-9);
    CHECK(transpose(matmul(a, b)) == matmul(transpose(b), transpose(a)));
  }
}

TEST_CASE("matmul shape mismatch names both shapes") {
  try {
    matmul(Tensor(2, 3), Tensor(2, 3));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2,3] x [2,3]") != std::string::npos);
  }
}

TEST_CASE("row_softmax") {
  const Tensor constant = Tensor::Row({2.5, 2.5, 2.5});
  const Tensor u = row_softmax(constant);
  for (double x : u.data()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const Tensor two = row_softmax(Tensor::Row({1.0, 0.0}));
  CHECK(two[0] == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)));
  CHECK(two[0] == doctest::Approx(0.73106).epsilon(1e-5));
  CHECK(two[1] == doctest::Approx(0.26894).epsilon(1e-4));

  SplitMix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor x = RandomTensor(3, 6, rng, -20.0, 20.0);
    const double shift = rng.Uniform(-50.0, 50.0);
    Tensor shifted = x;
    for (double& v : shifted.storage()) v += shift;
    const Tensor y = row_softmax(x);
    CHECK(max_abs_diff(y, row_softmax(shifted)) < 1e-12);
    for (size_t r = 0; r < y.rows(); ++r) {
      double total = 0.0;
      for (double v : y.row(r)) total += v;
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("row_softmax is stable for large logits") {
  const Tensor y = row_softmax(Tensor::Row({1000.0, 999.0}));
  CHECK(y.AllFinite());
  CHECK(y[0] == doctest::Approx(0.73106).epsilon(1e-5));
}

TEST_CASE("kl_row values") {
  const Tensor p = Tensor::Row({0.73106, 0.26894});
  const Tensor q = Tensor::Row({0.5, 0.5});
  CHECK(kl_row(p, p) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl_row(p, q) == doctest::Approx(0.1110).epsilon(5e-4));
  CHECK(kl_row(q, p) == doctest::Approx(0.1201).epsilon(5e-4));
  // Direct scalar arithmetic.
  const double direct = 0.73106 * std::log(0.73106 / 0.5) + 0.26894 * std::log(0.26894 / 0.5);
  CHECK(kl_row(p, q) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("kl_row rejects non-distributions") {
  CHECK_THROWS_AS(kl_row(Tensor::Row({0.5, 0.6}), Tensor::Row({0.5, 0.5})), DataError);
  CHECK_THROWS_AS(kl_row(Tensor::Row({1.0}), Tensor::Row({0.5, 0.5})), ShapeError);
}

TEST_CASE("kl_row is non-negative on random distributions") {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tensor p = row_softmax(RandomTensor(1, 5, rng, -5, 5));
    const Tensor q = row_softmax(RandomTensor(1, 5, rng, -5, 5));
    CHECK(kl_row(p, q) >= -1e-9);
  }
}

TEST_CASE("relu, concat_rows, mse, add") {
  CHECK(relu(Tensor::Row({-1.0, 2.0})) == Tensor::Row({0.0, 2.0}));
  CHECK(concat_rows({Tensor::Row({1.0, 2.0}), Tensor::Row({3.0})}) == Tensor::Row({1.0, 2.0, 3.0}));
  const Tensor a = Tensor::Row({1.0, -3.0, 0.5});
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(a, Tensor::Row({0.0, -3.0, 0.5})) == doctest::Approx(1.0 / 3.0));
  CHECK(add(a, a) == Tensor::Row({2.0, -6.0, 1.0}));
  CHECK_THROWS_AS(add(a, Tensor::Row({1.0})), ShapeError);
  CHECK_THROWS_AS(mse(a, Tensor(3, 1)), ShapeError);
  CHECK_THROWS_AS(concat_rows({Tensor(1, 2), Tensor(2, 2)}), ShapeError);
}

TEST_CASE("tensor construction validates shape") {
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Tensor({1, 1, 1}, {1.0}), ShapeError);
  const Tensor v({3}, {1.0, 2.0, 3.0});
  CHECK(v.rows() == 1);
  CHECK(v.cols() == 3);
}
