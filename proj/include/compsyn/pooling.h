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

#ifndef COMPSYN_POOLING_H_
#define COMPSYN_POOLING_H_

#include <span>
#include <string>
#include <vector>

#include "compsyn/manifest.h"
#include "compsyn/ptb.h"
#include "compsyn/tensor.h"

namespace compsyn::pooling {

enum class ChildWeighting {
  kUnweighted,  // every child counts once, whatever its size
  kTokenCount,  // weight children by subtree token count (reduces to meanpool)
};

// Hierarchical mean along the parse: leaves take their token rows
// left-to-right, every internal node averages its children's vectors, and
// unary nodes pass their child through unchanged.
Tensor syn_meanpool(const ptb::SyntaxTree& tree, const Tensor& token_embeddings,
                    ChildWeighting weighting = ChildWeighting::kUnweighted);

Tensor meanpool(const Tensor& token_embeddings);
Tensor first_token_pool(const EmbeddingSet& set);

enum class Strategy { kSyntactic, kMean, kFirst };
Strategy ParseStrategy(const std::string& name);
std::string ToString(Strategy strategy);

// Dispatches on strategy; the tree is only consulted for kSyntactic.
Tensor pool(Strategy strategy, const ptb::SyntaxTree* tree, const EmbeddingSet& set);

double euclidean(std::span<const double> a, std::span<const double> b);
double euclidean(const Tensor& a, const Tensor& b);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);
// Spearman rank correlation: Pearson correlation of average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct WinogroundScores {
  double text = 0.0;
  double image = 0.0;
  double group = 0.0;
};

struct PairOutcome {
  bool text = false;
  bool image = false;
  bool group() const { return text && image; }
};

// scores(i, j) = s(caption_i, image_j). Ties count as failures.
PairOutcome ScorePair(const Tensor& scores);
// Percentages over all pairs.
WinogroundScores winoground_scores(std::span<const Tensor> pairs);

}  // namespace compsyn::pooling

#endif  // COMPSYN_POOLING_H_
