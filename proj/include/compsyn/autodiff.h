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

#ifndef COMPSYN_AUTODIFF_H_
#define COMPSYN_AUTODIFF_H_

#include <cstddef>
#include <span>
#include <vector>

#include "compsyn/tensor.h"

namespace compsyn::ad {

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  const Tensor& grad() const;
  size_t id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  Tape* tape_ = nullptr;
  size_t id_ = 0;
};

enum class OpKind {
  kLeaf,
  kMatmul,
  kTranspose,
  kAdd,
  kConcatRows,
  kRelu,
  kRowSoftmax,
  kMse,
  kKlRows,
};

// Append-only computation graph. Nodes are stored in creation order, which
// is a topological order, so Backward() walks them in reverse exactly once.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Leaf(Tensor value);

  // Accumulates d(output)/d(node) into every node's adjoint. Output must be
  // 1 x 1. Calling it again first resets all adjoints.
  void Backward(Var output);

  const Tensor& value(size_t id) const { return nodes_[id].value; }
  const Tensor& grad(size_t id) const { return nodes_[id].grad; }
  size_t size() const { return nodes_.size(); }

 private:
  friend Var matmul(Var, Var);
  friend Var transpose(Var);
  friend Var add(Var, Var);
  friend Var concat_rows(std::span<const Var>);
  friend Var relu(Var);
  friend Var row_softmax(Var);
  friend Var mse(Var, Var);
  friend Var kl_rows(Var, Var);

  struct Node {
    OpKind op = OpKind::kLeaf;
    Tensor value;
    Tensor grad;
    std::vector<size_t> parents;
  };

  Var Push(OpKind op, Tensor value, std::vector<size_t> parents);
  void Propagate(const Node& node);

  std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var concat_rows(std::span<const Var> parts);
Var relu(Var a);
Var row_softmax(Var a);
// Scalar mean squared difference.
Var mse(Var a, Var b);
// Scalar sum over rows of KL(p_i || q_i), with the same epsilon floor as
// compsyn::kl_row. Rows are assumed to be probability distributions.
Var kl_rows(Var p, Var q);

}  // namespace compsyn::ad

#endif  // COMPSYN_AUTODIFF_H_
