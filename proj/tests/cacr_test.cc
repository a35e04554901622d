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

#include "compsyn/cacr.h"
#include "compsyn/errors.h"
#include "oracles.h"

using namespace compsyn;
using namespace compsyn::cacr;
using compsyn::testing::FiniteDifferenceGradient;
using compsyn::testing::RandomTensor;
using compsyn::testing::RelativeError;

namespace {

AttentionLayer MakeLayer(Tensor ll, Tensor lv, Tensor vl, Tensor vv) {
  AttentionLayer layer;
  layer.ll = std::move(ll);
  layer.lv = std::move(lv);
  layer.vl = std::move(vl);
  layer.vv = std::move(vv);
  return layer;
}

AttentionLayer RandomLayer(size_t nl, size_t nv, SplitMix64& rng) {
  return MakeLayer(RandomTensor(nl, nl, rng), RandomTensor(nl, nv, rng), RandomTensor(nv, nl, rng),
                   RandomTensor(nv, nv, rng));
}

Tensor Permutation(size_t n, SplitMix64& rng) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Shuffle(order, rng);
  Tensor p(n, n);
  for (size_t i = 0; i < n; ++i) p(i, order[i]) = 1.0;
  return p;
}

// Exchanges the roles of language and vision.
AttentionLayer Swap(const AttentionLayer& l) { return MakeLayer(l.vv, l.vl, l.lv, l.ll); }

double HandSymmetricKl(double p0, double q0) {
  const double p1 = 1.0 - p0, q1 = 1.0 - q0;
  return p0 * std::log(p0 / q0) + p1 * std::log(p1 / q1) + q0 * std::log(q0 / p0) +
         q1 * std::log(q1 / p1);
}

}  // namespace

TEST_CASE("m_kl identity, symmetry and non-negativity") {
  SplitMix64 rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng.Below(6);
    const Tensor a = row_softmax(RandomTensor(n, n, rng, -4, 4));
    const Tensor b = row_softmax(RandomTensor(n, n, rng, -4, 4));
    CHECK(std::abs(m_kl(a, a)) < 1e-12);
    CHECK(m_kl(a, b) == m_kl(b, a));
    CHECK(m_kl(a, b) >= -1e-9);
  }
}

TEST_CASE("cacr_l hand-computed 2x2 fixture") {
  const AttentionLayer layer = MakeLayer(Tensor::Identity(2), Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}}),
                                         Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}}), Tensor::Identity(2));
  const Tensor projected = Projected(layer, Side::kLanguage);
  CHECK(projected == Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}}));
  const double e = std::exp(1.0);
  const double per_row = HandSymmetricKl(e / (e + 1.0), 0.5);
  CHECK(per_row == doctest::Approx(0.2311).epsilon(5e-4));
  CHECK(cacr_l(layer) == doctest::Approx(2.0 * per_row).epsilon(1e-12));
  CHECK(std::abs(cacr_l(layer) - 0.4623) < 5e-4);
  CHECK(m_kl(row_softmax(projected), row_softmax(Tensor::Identity(2))) == doctest::Approx(0.4623).epsilon(1e-3));
}

TEST_CASE("uniform blocks give zero loss") {
  for (size_t nl : {1, 2, 5}) {
    for (size_t nv : {1, 3}) {
      const AttentionLayer layer = MakeLayer(Tensor(nl, nl, 0.7), Tensor(nl, nv, 0.7), Tensor(nv, nl, 0.7),
                                             Tensor(nv, nv, 0.7));
      CHECK(cacr_l(layer) < 1e-9);
      CHECK(cacr_v(layer) < 1e-9);
      CHECK(cacr_layer(layer).total < 1e-9);
    }
  }
}

TEST_CASE("permutation-congruent layers give zero loss") {
  SplitMix64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 1 + rng.Below(8);
    const Tensor p = Permutation(n, rng);
    const Tensor ll = RandomTensor(n, n, rng, -3, 3);
    const Tensor vv = matmul(matmul(transpose(p), ll), p);
    const AttentionLayer layer = MakeLayer(ll, p, transpose(p), vv);
    CHECK(cacr_l(layer) < 1e-9);
    CHECK(cacr_v(layer) < 1e-9);
    CHECK(hard_equivalence_loss(layer, Side::kLanguage) < 1e-9);
    CHECK(hard_equivalence_loss(layer, Side::kVision) < 1e-9);
  }
}

TEST_CASE("cacr_v equals cacr_l with roles exchanged") {
  SplitMix64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const AttentionLayer layer = RandomLayer(1 + rng.Below(5), 1 + rng.Below(5), rng);
    CHECK(cacr_v(layer) == cacr_l(Swap(layer)));
    CHECK(cacr_l(layer) == cacr_v(Swap(layer)));
  }
}

TEST_CASE("soft equivalence oracle matches the closed form") {
  SplitMix64 rng(54);
  const AttentionLayer fixed = RandomLayer(3, 4, rng);
  for (Side side : {Side::kLanguage, Side::kVision}) {
    const Tensor& target = side == Side::kLanguage ? fixed.ll : fixed.vv;
    const double via_oracle = m_kl(row_softmax(soft_equivalence_oracle(fixed, side)), row_softmax(target));
    CHECK(std::abs(via_oracle - cacr_side(fixed, side)) < 1e-9);
  }
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const AttentionLayer layer = RandomLayer(1 + rng.Below(8), 1 + rng.Below(8), rng);
    for (Side side : {Side::kLanguage, Side::kVision}) {
      worst = std::max(worst, max_abs_diff(soft_equivalence_oracle(layer, side), Projected(layer, side)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("oracle scalar and zero cases") {
  const AttentionLayer scalar = MakeLayer(Tensor::Row({1.7}), Tensor::Row({0.3}), Tensor::Row({-2.5}),
                                          Tensor::Row({0.9}));
  CHECK(soft_equivalence_oracle(scalar, Side::kVision)[0] == doctest::Approx(2.5 * 2.5 * 1.7));
  CHECK(soft_equivalence_oracle(scalar, Side::kLanguage)[0] == doctest::Approx(0.3 * 0.3 * 0.9));
  SplitMix64 rng(55);
  AttentionLayer zero = RandomLayer(3, 2, rng);
  zero.vl = Tensor(2, 3);
  CHECK(soft_equivalence_oracle(zero, Side::kVision) == Tensor(2, 2));
}

TEST_CASE("mean weighting is a uniform rescale of the sum form") {
  SplitMix64 rng(56);
  const AttentionLayer layer = RandomLayer(3, 5, rng);
  const Tensor sum = soft_equivalence_oracle(layer, Side::kVision, OracleWeighting::kSum);
  const Tensor mean = soft_equivalence_oracle(layer, Side::kVision, OracleWeighting::kMean);
  CHECK(max_abs_diff(scale(sum, 1.0 / 9.0), mean) < 1e-12);
}

TEST_CASE("language-only and inconsistent layers are rejected") {
  const AttentionLayer lang = MakeLayer(Tensor::Identity(2), Tensor(2, 0), Tensor(0, 2), Tensor(0, 0));
  CHECK_THROWS_WITH_AS(cacr_l(lang), doctest::Contains("N_V >= 1"), DataError);
  CHECK_THROWS_AS(hard_equivalence_loss(lang, Side::kVision), DataError);
  const AttentionLayer bad = MakeLayer(Tensor::Identity(2), Tensor(2, 3), Tensor(2, 2), Tensor(3, 3));
  CHECK_THROWS_AS(cacr_v(bad), ShapeError);
}

TEST_CASE("hard equivalence: collapse and one-hot agreement") {
  SplitMix64 rng(57);
  AttentionLayer layer = RandomLayer(4, 3, rng);
  layer.lv = Tensor(4, 3, 0.1);
  for (size_t i = 0; i < 4; ++i) layer.lv(i, 2) = 1.0;
  const Tensor t = HardTarget(layer, Side::kLanguage);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) CHECK(t(i, j) == layer.vv(2, 2));

  for (int trial = 0; trial < 100; ++trial) {
    const size_t nl = 1 + rng.Below(6), nv = 1 + rng.Below(6);
    AttentionLayer onehot = RandomLayer(nl, nv, rng);
    onehot.lv = Tensor(nl, nv);
    onehot.vl = Tensor(nv, nl);
    for (size_t i = 0; i < nl; ++i) onehot.lv(i, rng.Below(nv)) = 1.0;
    for (size_t i = 0; i < nv; ++i) onehot.vl(i, rng.Below(nl)) = 1.0;
    for (Side side : {Side::kLanguage, Side::kVision}) {
      CHECK(hard_equivalence_loss(onehot, side) == doctest::Approx(cacr_side(onehot, side)).epsilon(1e-12));
    }
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  CHECK(RowArgmax(Tensor::FromRows({{1, 3, 3}, {2, 2, 2}})) == std::vector<size_t>{1, 0});
}

TEST_CASE("hard equivalence is brittle under near-ties") {
  // Cross-modal rows whose top two weights differ by 1%.
  const Tensor diag = Tensor::FromRows({{4, 0}, {0, 4}});
  AttentionLayer layer = MakeLayer(diag, Tensor::FromRows({{1.0, 0.99}, {0.99, 1.0}}),
                                   Tensor::FromRows({{1.0, 0.99}, {0.99, 1.0}}), diag);
  const double perturbation = 0.01;
  const double hard_before = hard_equivalence_loss(layer, Side::kLanguage);
  const double soft_before = cacr_l(layer);
  // Flip the near-tie in row 0.
  layer.lv(0, 0) = 0.99;
  layer.lv(0, 1) = 1.0;
  const double hard_after = hard_equivalence_loss(layer, Side::kLanguage);
  const double soft_after = cacr_l(layer);
  const double hard_change = std::abs(hard_after - hard_before);
  const double soft_change = std::abs(soft_after - soft_before);
  CHECK(hard_change > 10.0 * perturbation);
  CHECK(hard_change > 10.0 * soft_change);
  CHECK(std::abs(hard_before - soft_before) > 10.0 * perturbation);
}

TEST_CASE("argmax entropy") {
  CHECK(argmax_entropy(Tensor::FromRows({{0, 1}, {0, 1}, {0.2, 0.9}})) == 0.0);
  CHECK(argmax_entropy(Tensor::Identity(4)) == doctest::Approx(2.0));
  SplitMix64 rng(58);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor block = RandomTensor(6, 4, rng);
    Tensor reversed(6, 4);
    for (size_t r = 0; r < 6; ++r)
      for (size_t c = 0; c < 4; ++c) reversed(5 - r, c) = block(r, c);
    CHECK(argmax_entropy(block) == argmax_entropy(reversed));
    CHECK(argmax_entropy(block) <= 2.0 + 1e-12);
  }
  CHECK_THROWS_AS(argmax_entropy(Tensor(0, 3)), DataError);
}

TEST_CASE("cacr_total selects layers and sums sides") {
  SplitMix64 rng(59);
  AttentionBundle bundle;
  bundle.n_language = 3;
  bundle.n_vision = 2;
  for (size_t i = 0; i < 3; ++i) {
    AttentionLayer layer = RandomLayer(3, 2, rng);
    layer.index = i;
    bundle.layers.push_back(layer);
  }
  const CacrResult last = cacr_total(bundle);
  CHECK(last.layers == std::vector<size_t>{2});
  CHECK(last.total == last.loss_l + last.loss_v);
  CHECK(last.loss_l == cacr_l(bundle.layers[2]));
  CHECK(last.loss_v == cacr_v(bundle.layers[2]));
  const CacrResult first = cacr_total(bundle, LayerSelector::At(0));
  CHECK(first.loss_l == cacr_l(bundle.layers[0]));
  const CacrResult all = cacr_total(bundle, LayerSelector::All());
  double expected = 0.0;
  for (const AttentionLayer& l : bundle.layers) expected += cacr_l(l) + cacr_v(l);
  CHECK(all.total == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(cacr_total(bundle, LayerSelector::At(3)), ConfigError);
  CHECK(LayerSelector::Parse("all").mode == LayerSelector::Mode::kAll);
  CHECK(LayerSelector::Parse("4").index == 4);
  CHECK_THROWS_AS(LayerSelector::Parse("-1"), ConfigError);
}

TEST_CASE("normalized bundles are rescaled, not softmaxed again") {
  AttentionBundle bundle;
  bundle.normalized = true;
  bundle.n_language = 2;
  bundle.n_vision = 2;
  const Tensor probs = Tensor::FromRows({{0.9, 0.1}, {0.2, 0.8}});
  bundle.layers.push_back(MakeLayer(probs, Tensor::Identity(2), Tensor::Identity(2), probs));
  const CacrResult r = cacr_total(bundle);
  CHECK(r.total < 1e-12);
  // Raw-score handling of the same numbers is not zero-loss for VV vs a
  // different LL.
  bundle.layers[0].vv = Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}});
  const double expected = m_kl(Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}}), probs);
  CHECK(cacr_total(bundle).loss_l == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cacr_total gradient matches finite differences") {
  SplitMix64 rng(60);
  for (int trial = 0; trial < 50; ++trial) {
    const AttentionLayer layer = RandomLayer(1 + rng.Below(4), 1 + rng.Below(4), rng);
    const CacrGradient g = cacr_total_gradient(layer);
    CHECK(g.total == doctest::Approx(cacr_layer(layer).total).epsilon(1e-12));
    const auto plain = [](const std::vector<Tensor>& in) {
      return cacr_layer(MakeLayer(in[0], in[1], in[2], in[3])).total;
    };
    const std::vector<Tensor> inputs = {layer.ll, layer.lv, layer.vl, layer.vv};
    const Tensor* grads[] = {&g.d_ll, &g.d_lv, &g.d_vl, &g.d_vv};
    for (size_t i = 0; i < 4; ++i) {
      CHECK(RelativeError(*grads[i], FiniteDifferenceGradient(plain, inputs, i)) < 1e-4);
    }
  }
}

TEST_CASE("operation counts scale as N^2 M versus N^2 M^2") {
  SplitMix64 rng(61);
  const AttentionLayer layer = RandomLayer(8, 6, rng);
  const OperationCount v = CountOperations(layer, Side::kVision);
  CHECK(v.closed_form == 6u * 8 * 8 + 6u * 8 * 6);
  CHECK(v.oracle == 6u * 6 * 8 * 8);
  CHECK(v.oracle > v.closed_form);
}
