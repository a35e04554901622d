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
#include <functional>

#include "doctest.h"

#include "compsyn/errors.h"
#include "compsyn/pooling.h"
#include "oracles.h"

using namespace compsyn;
using namespace compsyn::pooling;
using compsyn::testing::RandomTensor;
using ptb::parse_tree;
using ptb::SyntaxTree;

namespace {

SyntaxTree Pos(const std::string& token) { return SyntaxTree::Node("X", {SyntaxTree::Leaf(token)}); }

// Random tree with exactly `tokens` leaves.
SyntaxTree RandomShape(size_t tokens, SplitMix64& rng, size_t& next) {
  if (tokens == 1) {
    SyntaxTree leaf = Pos("t" + std::to_string(next++));
    // Occasional unary chains above the POS node.
    while (rng.Uniform() < 0.2) leaf = SyntaxTree::Node("U", {leaf});
    return leaf;
  }
  const size_t arity = std::min<size_t>(tokens, 2 + rng.Below(3));
  std::vector<size_t> sizes(arity, 1);
  for (size_t extra = tokens - arity; extra > 0; --extra) ++sizes[rng.Below(arity)];
  std::vector<SyntaxTree> children;
  for (size_t s : sizes) children.push_back(RandomShape(s, rng, next));
  return SyntaxTree::Node("P", std::move(children));
}

// Coefficient of every token in the hierarchical mean, derived from the
// tree alone.
void Coefficients(const SyntaxTree& node, double weight, size_t& next, std::vector<double>& out) {
  if (node.is_leaf()) {
    out[next++] += weight;
    return;
  }
  for (const SyntaxTree& child : node.children)
    Coefficients(child, weight / static_cast<double>(node.children.size()), next, out);
}

}  // namespace

TEST_CASE("syn_meanpool on ((a b) c) differs from the flat mean") {
  const SyntaxTree tree = parse_tree("(S (NP (X a) (X b)) (X c))");
  const Tensor rows = Tensor::FromRows({{1, 0}, {0, 1}, {1, 1}});
  CHECK(syn_meanpool(tree, rows) == Tensor::Row({0.75, 0.75}));
  const Tensor flat = meanpool(rows);
  CHECK(flat[0] == doctest::Approx(2.0 / 3.0));
  CHECK(flat[1] == doctest::Approx(2.0 / 3.0));
  // Token-count weighting collapses to the flat mean.
  CHECK(max_abs_diff(syn_meanpool(tree, rows, ChildWeighting::kTokenCount), flat) < 1e-15);
}

TEST_CASE("flat tree equals meanpool exactly") {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t t = 1 + rng.Below(9);
    std::vector<SyntaxTree> kids;
    for (size_t i = 0; i < t; ++i) kids.push_back(Pos("w"));
    const SyntaxTree tree = SyntaxTree::Node("S", std::move(kids));
    const Tensor rows = RandomTensor(t, 5, rng, -10, 10);
    CHECK(syn_meanpool(tree, rows) == meanpool(rows));
  }
}

TEST_CASE("single token pools to itself") {
  const Tensor row = Tensor::FromRows({{0.3, -1.2}});
  CHECK(syn_meanpool(parse_tree("(NN dog)"), row) == Tensor::Row({0.3, -1.2}));
  CHECK(meanpool(row) == Tensor::Row({0.3, -1.2}));
  EmbeddingSet set{"s", {"dog"}, row, std::nullopt};
  CHECK(first_token_pool(set) == Tensor::Row({0.3, -1.2}));
  CHECK(meanpool(Tensor::FromRows({{1, 0}, {0, 1}})) == Tensor::Row({0.5, 0.5}));
}

TEST_CASE("leaf/token mismatch is an error") {
  const SyntaxTree tree = parse_tree("(S (X a) (X b))");
  CHECK_THROWS_AS(syn_meanpool(tree, Tensor(3, 2)), ShapeError);
  CHECK_THROWS_AS(syn_meanpool(tree, Tensor(1, 2)), ShapeError);
}

TEST_CASE("meanpool is permutation invariant, syn_meanpool is not") {
  const SyntaxTree tree = parse_tree("(S (NP (X a) (X b)) (X c))");
  const Tensor abc = Tensor::FromRows({{1, 0}, {0, 1}, {1, 1}});
  const Tensor cab = Tensor::FromRows({{1, 1}, {1, 0}, {0, 1}});
  CHECK(max_abs_diff(meanpool(abc), meanpool(cab)) < 1e-15);
  CHECK(syn_meanpool(tree, abc) != syn_meanpool(tree, cab));
}

TEST_CASE("right-branching trees weight tokens by powers of two") {
  SplitMix64 rng(72);
  for (size_t t = 1; t <= 10; ++t) {
    SyntaxTree tree = Pos("w");
    for (size_t i = 1; i < t; ++i) tree = SyntaxTree::Node("R", {Pos("w"), tree});
    const Tensor rows = RandomTensor(t, 4, rng);
    Tensor expected(1, 4);
    for (size_t i = 0; i < t; ++i) {
      const double w = i + 1 < t ? std::ldexp(1.0, -static_cast<int>(i + 1)) : std::ldexp(1.0, -static_cast<int>(t - 1));
      for (size_t d = 0; d < 4; ++d) expected[d] += w * rows(i, d);
    }
    CHECK(max_abs_diff(syn_meanpool(tree, rows), expected) < 1e-12);
  }
}

TEST_CASE("property: output is a convex combination of token rows") {
  SplitMix64 rng(73);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t t = 1 + rng.Below(10);
    size_t next = 0;
    const SyntaxTree tree = RandomShape(t, rng, next);
    const Tensor rows = RandomTensor(t, 3, rng, -5, 5);
    std::vector<double> lambda(t, 0.0);
    size_t cursor = 0;
    Coefficients(tree, 1.0, cursor, lambda);
    double total = 0.0;
    Tensor expected(1, 3);
    for (size_t i = 0; i < t; ++i) {
      CHECK(lambda[i] >= 0.0);
      total += lambda[i];
      for (size_t d = 0; d < 3; ++d) expected[d] += lambda[i] * rows(i, d);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    const Tensor got = syn_meanpool(tree, rows);
    CHECK(max_abs_diff(got, expected) < 1e-12);
    for (size_t d = 0; d < 3; ++d) {
      double lo = rows(0, d), hi = rows(0, d);
      for (size_t i = 1; i < t; ++i) lo = std::min(lo, rows(i, d)), hi = std::max(hi, rows(i, d));
      CHECK(got[d] >= lo - 1e-12);
      CHECK(got[d] <= hi + 1e-12);
    }
  }
}

TEST_CASE("strategies") {
  CHECK(ParseStrategy("syn") == Strategy::kSyntactic);
  CHECK(ToString(ParseStrategy("first")) == "first");
  CHECK_THROWS_AS(ParseStrategy("max"), ConfigError);
  EmbeddingSet set{"s", {"a", "b"}, Tensor::FromRows({{1, 0}, {0, 1}}), std::nullopt};
  CHECK_THROWS_AS(pool(Strategy::kSyntactic, nullptr, set), ConfigError);
  CHECK(pool(Strategy::kFirst, nullptr, set) == Tensor::Row({1, 0}));
}

TEST_CASE("euclidean and spearman") {
  const Tensor x = Tensor::Row({1.0, 2.0, -3.0});
  CHECK(euclidean(x, x) == 0.0);
  CHECK(euclidean(Tensor::Row({0, 0}), Tensor::Row({3, 4})) == 5.0);
  const std::vector<double> a = {1, 2, 3}, b = {3, 2, 1};
  CHECK(spearman(a, b) == doctest::Approx(-1.0));
  const std::vector<double> c = {0.1, 5, 7, 100}, d = {-3, -2, 8, 9};
  CHECK(spearman(c, d) == doctest::Approx(1.0));
  CHECK(AverageRanks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
  // Hand-checked tie case: ranks x = {1, 2.5, 2.5, 4}, y = {1, 2, 3, 4}.
  const std::vector<double> tx = {1, 2, 2, 3}, ty = {1, 2, 3, 4};
  CHECK(spearman(tx, ty) == doctest::Approx(4.5 / std::sqrt(4.5 * 5.0)));
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{2}), DataError);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1}, std::vector<double>{2, 3}), NumericalError);
}

TEST_CASE("winoground hand fixtures") {
  const Tensor diag = Tensor::FromRows({{1, 0}, {0, 1}});
  const WinogroundScores perfect = winoground_scores(std::vector<Tensor>{diag});
  CHECK(perfect.text == 100.0);
  CHECK(perfect.image == 100.0);
  CHECK(perfect.group == 100.0);
  const WinogroundScores fail = winoground_scores(std::vector<Tensor>{Tensor::FromRows({{0.9, 0.7}, {0.8, 0.6}})});
  CHECK(fail.text == 0.0);
  CHECK(fail.image == 0.0);
  CHECK(fail.group == 0.0);
  const WinogroundScores ties = winoground_scores(std::vector<Tensor>{Tensor(2, 2, 0.5)});
  CHECK(ties.text == 0.0);
  CHECK(ties.image == 0.0);
  CHECK(ties.group == 0.0);
  // Text right, image wrong.
  const PairOutcome mixed = ScorePair(Tensor::FromRows({{0.9, 0.95}, {0.1, 0.96}}));
  CHECK(mixed.text);
  CHECK(!mixed.image);
  const WinogroundScores half = winoground_scores(std::vector<Tensor>{diag, Tensor(2, 2)});
  CHECK(half.group == 50.0);
  CHECK_THROWS_AS(winoground_scores(std::vector<Tensor>{}), DataError);
}

TEST_CASE("property: group never exceeds text or image") {
  SplitMix64 rng(74);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Tensor> pairs;
    const size_t n = 1 + rng.Below(8);
    for (size_t i = 0; i < n; ++i) {
      Tensor s = RandomTensor(2, 2, rng);
      if (rng.Uniform() < 0.1) s(0, 1) = s(0, 0);  // inject ties
      pairs.push_back(s);
    }
    const WinogroundScores w = winoground_scores(pairs);
    CHECK(w.group <= std::min(w.text, w.image));
  }
}
