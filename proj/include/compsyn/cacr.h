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

#ifndef COMPSYN_CACR_H_
#define COMPSYN_CACR_H_

#include <cstdint>
#include <optional>
#include <string>

#include "compsyn/autodiff.h"
#include "compsyn/manifest.h"
#include "compsyn/tensor.h"

namespace compsyn::cacr {

// Which modality's intra-modal attention is the alignment target.
//   kLanguage: m-KL(norm(S_LV S_VV S_LV^T), norm(S_LL))
//   kVision:   m-KL(norm(S_VL S_LL S_VL^T), norm(S_VV))
enum class Side { kLanguage, kVision };

// How rows are turned into distributions before m-KL. Raw scores use a row
// softmax; bundles exported as already-normalized probabilities are only
// rescaled to sum to one, so softmax is never applied twice.
enum class Normalizer { kSoftmax, kRenormalize };

// Symmetric matrix KL: sum_i KL(a_i || b_i) + KL(b_i || a_i).
double m_kl(const Tensor& a, const Tensor& b);

Tensor Normalize(const Tensor& scores, Normalizer normalizer);

// Closed-form projection of the opposite modality into `side`'s basis.
Tensor Projected(const AttentionLayer& layer, Side side);

double cacr_side(const AttentionLayer& layer, Side side,
                 Normalizer normalizer = Normalizer::kSoftmax);
double cacr_l(const AttentionLayer& layer, Normalizer normalizer = Normalizer::kSoftmax);
double cacr_v(const AttentionLayer& layer, Normalizer normalizer = Normalizer::kSoftmax);

enum class OracleWeighting {
  kSum,   // matches the closed-form product exactly
  kMean,  // divides each entry by (inner dimension)^2
};

// Soft cross-modal equivalence built element by element: for every output
// entry (i, j), a weighted sum over all pairs of opposite-modality tokens,
// O(N^2 M^2) multiply-adds. Returns the full projected matrix so callers
// normalize and compare exactly as with Projected().
Tensor soft_equivalence_oracle(const AttentionLayer& layer, Side side,
                               OracleWeighting weighting = OracleWeighting::kSum);

// Index of the largest entry in each row; ties go to the lowest index.
std::vector<size_t> RowArgmax(const Tensor& block);

// Hard (one-hot argmax) counterpart of Projected().
Tensor HardTarget(const AttentionLayer& layer, Side side);
double hard_equivalence_loss(const AttentionLayer& layer, Side side,
                             Normalizer normalizer = Normalizer::kSoftmax);

// Shannon entropy in bits of the per-row argmax column distribution.
double argmax_entropy(const Tensor& cross_block);

struct CacrResult {
  double loss_l = 0.0;
  double loss_v = 0.0;
  double total = 0.0;
  Tensor projected_l;  // S_LV S_VV S_LV^T of the last evaluated layer
  Tensor projected_v;  // S_VL S_LL S_VL^T of the last evaluated layer
  std::vector<size_t> layers;
};

// Selects the layer(s) a loss is evaluated on. Default is the last layer;
// `all` sums the per-layer losses.
struct LayerSelector {
  enum class Mode { kLast, kIndex, kAll };
  Mode mode = Mode::kLast;
  size_t index = 0;

  static LayerSelector Last() { return {}; }
  static LayerSelector At(size_t i) { return {Mode::kIndex, i}; }
  static LayerSelector All() { return {Mode::kAll, 0}; }
  // "last", "all" or a zero-based integer.
  static LayerSelector Parse(const std::string& text);
};

CacrResult cacr_layer(const AttentionLayer& layer, Normalizer normalizer = Normalizer::kSoftmax);
CacrResult cacr_total(const AttentionBundle& bundle, LayerSelector selector = LayerSelector::Last());

// The total loss recorded on a tape so it can serve as a training
// regularizer; inputs are the four raw blocks.
ad::Var cacr_total(ad::Var ll, ad::Var lv, ad::Var vl, ad::Var vv);

struct CacrGradient {
  double total = 0.0;
  Tensor d_ll, d_lv, d_vl, d_vv;
};

CacrGradient cacr_total_gradient(const AttentionLayer& layer);

// Multiply-add counts for one side; inner = dimension summed over.
struct OperationCount {
  uint64_t closed_form = 0;
  uint64_t oracle = 0;
};
OperationCount CountOperations(const AttentionLayer& layer, Side side);

}  // namespace compsyn::cacr

#endif  // COMPSYN_CACR_H_
