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

#include "compsyn/pooling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "compsyn/errors.h"

namespace compsyn::pooling {

namespace {

struct Pooled {
  std::vector<double> vec;
  size_t tokens = 0;
};

Pooled Pool(const ptb::SyntaxTree& node, const Tensor& rows, size_t& next, ChildWeighting weighting) {
  if (node.is_leaf()) {
    if (next >= rows.rows()) {
      throw ShapeError("syn_meanpool: tree has more leaves than the " + std::to_string(rows.rows()) +
                       " token rows");
    }
    const auto row = rows.row(next++);
    return {std::vector<double>(row.begin(), row.end()), 1};
  }
  if (node.children.size() == 1) return Pool(node.children.front(), rows, next, weighting);
  std::vector<Pooled> parts;
  for (const ptb::SyntaxTree& child : node.children) parts.push_back(Pool(child, rows, next, weighting));
  Pooled out;
  out.vec.assign(rows.cols(), 0.0);
  for (const Pooled& p : parts) out.tokens += p.tokens;
  // Sum first, divide once: a flat tree then matches meanpool bit for bit.
  for (const Pooled& p : parts) {
    const double w = weighting == ChildWeighting::kUnweighted ? 1.0 : static_cast<double>(p.tokens);
    for (size_t d = 0; d < out.vec.size(); ++d) out.vec[d] += w * p.vec[d];
  }
  const double denom = weighting == ChildWeighting::kUnweighted ? static_cast<double>(parts.size())
                                                                : static_cast<double>(out.tokens);
  for (double& x : out.vec) x /= denom;
  return out;
}

}  // namespace

Tensor syn_meanpool(const ptb::SyntaxTree& tree, const Tensor& token_embeddings, ChildWeighting weighting) {
  size_t next = 0;
  Pooled result = Pool(tree, token_embeddings, next, weighting);
  if (next != token_embeddings.rows()) {
    throw ShapeError("syn_meanpool: tree has " + std::to_string(next) + " leaves but there are " +
                     std::to_string(token_embeddings.rows()) + " token rows");
  }
  return Tensor::Row(std::move(result.vec));
}

Tensor meanpool(const Tensor& token_embeddings) {
  if (token_embeddings.rows() == 0 || token_embeddings.empty()) throw ShapeError("meanpool: no tokens");
  Tensor out(1, token_embeddings.cols());
  for (size_t r = 0; r < token_embeddings.rows(); ++r)
    for (size_t c = 0; c < out.cols(); ++c) out[c] += token_embeddings(r, c);
  for (double& x : out.storage()) x /= static_cast<double>(token_embeddings.rows());
  return out;
}

Tensor first_token_pool(const EmbeddingSet& set) {
  if (set.token_embeddings.rows() == 0) throw ShapeError("first_token_pool: no tokens");
  return set.Token(0);
}

Strategy ParseStrategy(const std::string& name) {
  if (name == "syn") return Strategy::kSyntactic;
  if (name == "mean") return Strategy::kMean;
  if (name == "first") return Strategy::kFirst;
  throw ConfigError("unknown pooling strategy '" + name + "' (expected syn, mean or first)");
}

std::string ToString(Strategy strategy) {
  switch (strategy) {
    case Strategy::kSyntactic: return "syn";
    case Strategy::kMean: return "mean";
    case Strategy::kFirst: return "first";
  }
  return "?";
}

Tensor pool(Strategy strategy, const ptb::SyntaxTree* tree, const EmbeddingSet& set) {
  switch (strategy) {
    case Strategy::kSyntactic:
      if (tree == nullptr) throw ConfigError("syntactic pooling needs a parse tree");
      return syn_meanpool(*tree, set.token_embeddings);
    case Strategy::kMean:
      return meanpool(set.token_embeddings);
    case Strategy::kFirst:
      return first_token_pool(set);
  }
  return {};
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("euclidean: length mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

double euclidean(const Tensor& a, const Tensor& b) { return euclidean(a.data(), b.data()); }

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ShapeError("spearman: length mismatch");
  if (xs.size() < 2) throw DataError("spearman: need at least two observations");
  const std::vector<double> rx = AverageRanks(xs), ry = AverageRanks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericalError("spearman: constant input has no rank correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

PairOutcome ScorePair(const Tensor& s) {
  if (s.rows() != 2 || s.cols() != 2) throw ShapeError("winoground: scores must be 2x2, got " + s.ShapeString());
  PairOutcome out;
  out.text = s(0, 0) > s(1, 0) && s(1, 1) > s(0, 1);
  out.image = s(0, 0) > s(0, 1) && s(1, 1) > s(1, 0);
  return out;
}

WinogroundScores winoground_scores(std::span<const Tensor> pairs) {
  if (pairs.empty()) throw DataError("winoground: no pairs");
  size_t text = 0, image = 0, group = 0;
  for (const Tensor& s : pairs) {
    const PairOutcome o = ScorePair(s);
    text += o.text;
    image += o.image;
    group += o.group();
  }
  const double n = static_cast<double>(pairs.size());
  return {100.0 * static_cast<double>(text) / n, 100.0 * static_cast<double>(image) / n,
          100.0 * static_cast<double>(group) / n};
}

}  // namespace compsyn::pooling
