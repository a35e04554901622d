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

#include "compsyn/cacr.h"

#include <cmath>
#include <map>

#include "compsyn/errors.h"

namespace compsyn::cacr {

namespace {

void RequireCrossModal(const AttentionLayer& layer) {
  layer.Validate();
  if (layer.n_language() == 0) throw DataError("CACR requires N_L >= 1");
  if (layer.n_vision() == 0) {
    throw DataError("CACR requires N_V >= 1 (layer " + std::to_string(layer.index) +
                    " is language-only)");
  }
}

// (cross, intra, target) for the requested side.
struct SideBlocks {
  const Tensor& cross;   // rows: this side, cols: other side
  const Tensor& other;   // other side's intra-modal block
  const Tensor& target;  // this side's intra-modal block
};

SideBlocks Blocks(const AttentionLayer& layer, Side side) {
  if (side == Side::kLanguage) return {layer.lv, layer.vv, layer.ll};
  return {layer.vl, layer.ll, layer.vv};
}

}  // namespace

double m_kl(const Tensor& a, const Tensor& b) {
  if (!a.SameShape(b)) {
    throw ShapeError("m_kl: shape mismatch " + a.ShapeString() + " vs " + b.ShapeString());
  }
  double total = 0.0;
  for (size_t r = 0; r < a.rows(); ++r) {
    total += kl_row(a.row(r), b.row(r)) + kl_row(b.row(r), a.row(r));
  }
  return total;
}

Tensor Normalize(const Tensor& scores, Normalizer normalizer) {
  if (normalizer == Normalizer::kSoftmax) return row_softmax(scores);
  Tensor out = scores;
  for (size_t r = 0; r < out.rows(); ++r) {
    double total = 0.0;
    for (size_t c = 0; c < out.cols(); ++c) {
      if (out(r, c) < 0.0) throw DataError("normalized attention has a negative entry");
      total += out(r, c);
    }
    if (!(total > 0.0)) throw NumericalError("attention row " + std::to_string(r) + " sums to zero");
    for (size_t c = 0; c < out.cols(); ++c) out(r, c) /= total;
  }
  return out;
}

Tensor Projected(const AttentionLayer& layer, Side side) {
  RequireCrossModal(layer);
  const SideBlocks b = Blocks(layer, side);
  return matmul(matmul(b.cross, b.other), transpose(b.cross));
}

double cacr_side(const AttentionLayer& layer, Side side, Normalizer normalizer) {
  const Tensor projected = Projected(layer, side);
  return m_kl(Normalize(projected, normalizer), Normalize(Blocks(layer, side).target, normalizer));
}

double cacr_l(const AttentionLayer& layer, Normalizer normalizer) {
  return cacr_side(layer, Side::kLanguage, normalizer);
}

double cacr_v(const AttentionLayer& layer, Normalizer normalizer) {
  return cacr_side(layer, Side::kVision, normalizer);
}

Tensor soft_equivalence_oracle(const AttentionLayer& layer, Side side, OracleWeighting weighting) {
  RequireCrossModal(layer);
  const SideBlocks b = Blocks(layer, side);
  const size_t n = b.cross.rows();   // tokens on this side
  const size_t m = b.cross.cols();   // tokens on the other side
  Tensor out(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      // Soft weighting W[k, p] = cross[i, k] * cross[j, p] over every pair
      // of counterparts, applied to the other modality's relation k -> p.
      double acc = 0.0;
      for (size_t k = 0; k < m; ++k) {
        for (size_t p = 0; p < m; ++p) {
          acc += b.cross(i, k) * b.cross(j, p) * b.other(k, p);
        }
      }
      if (weighting == OracleWeighting::kMean) acc /= static_cast<double>(m * m);
      out(i, j) = acc;
    }
  }
  return out;
}

std::vector<size_t> RowArgmax(const Tensor& block) {
  if (block.cols() == 0) throw DataError("argmax over an empty row");
  std::vector<size_t> out(block.rows());
  for (size_t r = 0; r < block.rows(); ++r) {
    size_t best = 0;
    for (size_t c = 1; c < block.cols(); ++c)
      if (block(r, c) > block(r, best)) best = c;
    out[r] = best;
  }
  return out;
}

Tensor HardTarget(const AttentionLayer& layer, Side side) {
  RequireCrossModal(layer);
  const SideBlocks b = Blocks(layer, side);
  const std::vector<size_t> counterpart = RowArgmax(b.cross);
  const size_t n = counterpart.size();
  Tensor out(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out(i, j) = b.other(counterpart[i], counterpart[j]);
  return out;
}

double hard_equivalence_loss(const AttentionLayer& layer, Side side, Normalizer normalizer) {
  const Tensor target = HardTarget(layer, side);
  return m_kl(Normalize(target, normalizer), Normalize(Blocks(layer, side).target, normalizer));
}

double argmax_entropy(const Tensor& cross_block) {
  if (cross_block.rows() == 0) throw DataError("argmax_entropy needs at least one row");
  std::map<size_t, size_t> histogram;
  for (size_t c : RowArgmax(cross_block)) ++histogram[c];
  const double m = static_cast<double>(cross_block.rows());
  double bits = 0.0;
  for (const auto& [column, count] : histogram) {
    const double p = static_cast<double>(count) / m;
    bits -= p * std::log2(p);
  }
  return bits == 0.0 ? 0.0 : bits;  // normalize -0
}

LayerSelector LayerSelector::Parse(const std::string& text) {
  if (text == "last") return Last();
  if (text == "all") return All();
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("layer selector must be 'last', 'all' or an index, got '" + text + "'");
  }
  return At(std::stoull(text));
}

CacrResult cacr_layer(const AttentionLayer& layer, Normalizer normalizer) {
  CacrResult r;
  r.projected_l = Projected(layer, Side::kLanguage);
  r.projected_v = Projected(layer, Side::kVision);
  r.loss_l = m_kl(Normalize(r.projected_l, normalizer), Normalize(layer.ll, normalizer));
  r.loss_v = m_kl(Normalize(r.projected_v, normalizer), Normalize(layer.vv, normalizer));
  r.total = r.loss_l + r.loss_v;
  r.layers = {layer.index};
  return r;
}

CacrResult cacr_total(const AttentionBundle& bundle, LayerSelector selector) {
  if (bundle.layers.empty()) throw DataError("attention bundle '" + bundle.id + "' has no layers");
  const Normalizer normalizer = bundle.normalized ? Normalizer::kRenormalize : Normalizer::kSoftmax;
  switch (selector.mode) {
    case LayerSelector::Mode::kLast:
      return cacr_layer(bundle.layers.back(), normalizer);
    case LayerSelector::Mode::kIndex:
      if (selector.index >= bundle.layers.size()) {
        throw ConfigError("layer " + std::to_string(selector.index) + " out of range; bundle has " +
                          std::to_string(bundle.layers.size()));
      }
      return cacr_layer(bundle.layers[selector.index], normalizer);
    case LayerSelector::Mode::kAll: {
      CacrResult sum;
      for (const AttentionLayer& layer : bundle.layers) {
        CacrResult r = cacr_layer(layer, normalizer);
        sum.loss_l += r.loss_l;
        sum.loss_v += r.loss_v;
        sum.projected_l = std::move(r.projected_l);
        sum.projected_v = std::move(r.projected_v);
        sum.layers.push_back(layer.index);
      }
      sum.total = sum.loss_l + sum.loss_v;
      return sum;
    }
  }
  return {};
}

ad::Var cacr_total(ad::Var ll, ad::Var lv, ad::Var vl, ad::Var vv) {
  const auto side = [](ad::Var cross, ad::Var other, ad::Var target) {
    const ad::Var projected = ad::matmul(ad::matmul(cross, other), ad::transpose(cross));
    const ad::Var p = ad::row_softmax(projected);
    const ad::Var q = ad::row_softmax(target);
    return ad::add(ad::kl_rows(p, q), ad::kl_rows(q, p));
  };
  return ad::add(side(lv, vv, ll), side(vl, ll, vv));
}

CacrGradient cacr_total_gradient(const AttentionLayer& layer) {
  RequireCrossModal(layer);
  ad::Tape tape;
  const ad::Var ll = tape.Leaf(layer.ll), lv = tape.Leaf(layer.lv), vl = tape.Leaf(layer.vl),
                vv = tape.Leaf(layer.vv);
  const ad::Var total = cacr_total(ll, lv, vl, vv);
  tape.Backward(total);
  return {total.value()[0], ll.grad(), lv.grad(), vl.grad(), vv.grad()};
}

OperationCount CountOperations(const AttentionLayer& layer, Side side) {
  const uint64_t n = side == Side::kLanguage ? layer.n_language() : layer.n_vision();
  const uint64_t m = side == Side::kLanguage ? layer.n_vision() : layer.n_language();
  // (n x m)(m x m) then (n x m)(m x n)
  return {n * m * m + n * m * n, n * n * m * m};
}

}  // namespace compsyn::cacr
