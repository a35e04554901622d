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

#include "compsyn/autodiff.h"

#include <cmath>

#include "compsyn/errors.h"

namespace compsyn::ad {

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::Push(OpKind op, Tensor value, std::vector<size_t> parents) {
  Node node;
  node.op = op;
  node.grad = Tensor(value.rows(), value.cols());
  node.value = std::move(value);
  node.parents = std::move(parents);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::Leaf(Tensor value) {
  if (value.rank() == 1) value = Tensor({1, value.cols()}, value.storage());
  return Push(OpKind::kLeaf, std::move(value), {});
}

void Tape::Backward(Var output) {
  if (output.tape() != this) throw Error("Backward: variable from another tape");
  const Tensor& out = nodes_[output.id()].value;
  if (out.rows() != 1 || out.cols() != 1) {
    throw ShapeError("Backward: output must be scalar, got " +
                     out.ShapeString());
  }
  for (Node& n : nodes_) std::fill(n.grad.storage().begin(), n.grad.storage().end(), 0.0);
  nodes_[output.id()].grad[0] = 1.0;
  for (size_t id = output.id() + 1; id-- > 0;) Propagate(nodes_[id]);
}

void Tape::Propagate(const Node& node) {
  const Tensor& g = node.grad;
  switch (node.op) {
    case OpKind::kLeaf:
      return;
    case OpKind::kMatmul: {
      Node& a = nodes_[node.parents[0]];
      Node& b = nodes_[node.parents[1]];
      // dA = G * B^T, dB = A^T * G
      const size_t m = a.value.rows(), k = a.value.cols(), n = b.value.cols();
      for (size_t i = 0; i < m; ++i)
        for (size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (size_t j = 0; j < n; ++j) acc += g(i, j) * b.value(p, j);
          a.grad(i, p) += acc;
        }
      for (size_t p = 0; p < k; ++p)
        for (size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (size_t i = 0; i < m; ++i) acc += a.value(i, p) * g(i, j);
          b.grad(p, j) += acc;
        }
      return;
    }
    case OpKind::kTranspose: {
      Node& a = nodes_[node.parents[0]];
      for (size_t i = 0; i < g.rows(); ++i)
        for (size_t j = 0; j < g.cols(); ++j) a.grad(j, i) += g(i, j);
      return;
    }
    case OpKind::kAdd:
      for (size_t parent : node.parents) {
        Tensor& pg = nodes_[parent].grad;
        for (size_t i = 0; i < g.size(); ++i) pg[i] += g[i];
      }
      return;
    case OpKind::kConcatRows: {
      size_t offset = 0;
      for (size_t parent : node.parents) {
        Tensor& pg = nodes_[parent].grad;
        for (size_t r = 0; r < pg.rows(); ++r)
          for (size_t c = 0; c < pg.cols(); ++c) pg(r, c) += g(r, offset + c);
        offset += pg.cols();
      }
      return;
    }
    case OpKind::kRelu: {
      Node& a = nodes_[node.parents[0]];
      for (size_t i = 0; i < g.size(); ++i)
        if (a.value[i] > 0.0) a.grad[i] += g[i];
      return;
    }
    case OpKind::kRowSoftmax: {
      Node& a = nodes_[node.parents[0]];
      const Tensor& y = node.value;
      for (size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
        for (size_t c = 0; c < y.cols(); ++c)
          a.grad(r, c) += y(r, c) * (g(r, c) - dot);
      }
      return;
    }
    case OpKind::kMse: {
      Node& a = nodes_[node.parents[0]];
      Node& b = nodes_[node.parents[1]];
      const double factor = 2.0 * g[0] / static_cast<double>(a.value.size());
      for (size_t i = 0; i < a.value.size(); ++i) {
        const double d = factor * (a.value[i] - b.value[i]);
        a.grad[i] += d;
        b.grad[i] -= d;
      }
      return;
    }
    case OpKind::kKlRows: {
      Node& p = nodes_[node.parents[0]];
      Node& q = nodes_[node.parents[1]];
      for (size_t i = 0; i < p.value.size(); ++i) {
        const double pe = p.value[i] + kKlEpsilon;
        const double qe = q.value[i] + kKlEpsilon;
        p.grad[i] += g[0] * (std::log(pe / qe) + p.value[i] / pe);
        q.grad[i] -= g[0] * p.value[i] / qe;
      }
      return;
    }
  }
}

namespace {

Tape* SameTape(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw Error("autodiff: operands recorded on different tapes");
  }
  return a.tape();
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape* tape = SameTape(a, b);
  return tape->Push(OpKind::kMatmul, compsyn::matmul(a.value(), b.value()),
                    {a.id(), b.id()});
}

Var transpose(Var a) {
  return a.tape()->Push(OpKind::kTranspose, compsyn::transpose(a.value()),
                        {a.id()});
}

Var add(Var a, Var b) {
  Tape* tape = SameTape(a, b);
  return tape->Push(OpKind::kAdd, compsyn::add(a.value(), b.value()),
                    {a.id(), b.id()});
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  std::vector<Tensor> values;
  std::vector<size_t> ids;
  values.reserve(parts.size());
  for (const Var& v : parts) {
    SameTape(parts.front(), v);
    values.push_back(v.value());
    ids.push_back(v.id());
  }
  return parts.front().tape()->Push(OpKind::kConcatRows,
                                    compsyn::concat_rows(values),
                                    std::move(ids));
}

Var relu(Var a) {
  return a.tape()->Push(OpKind::kRelu, compsyn::relu(a.value()), {a.id()});
}

Var row_softmax(Var a) {
  return a.tape()->Push(OpKind::kRowSoftmax, compsyn::row_softmax(a.value()),
                        {a.id()});
}

Var mse(Var a, Var b) {
  Tape* tape = SameTape(a, b);
  return tape->Push(OpKind::kMse,
                    Tensor(1, 1, compsyn::mse(a.value(), b.value())),
                    {a.id(), b.id()});
}

Var kl_rows(Var p, Var q) {
  Tape* tape = SameTape(p, q);
  const Tensor& pv = p.value();
  const Tensor& qv = q.value();
  if (!pv.SameShape(qv)) {
    throw ShapeError("kl_rows: shape mismatch " + pv.ShapeString() + " vs " +
                     qv.ShapeString());
  }
  double total = 0.0;
  for (size_t r = 0; r < pv.rows(); ++r) total += compsyn::kl_row(pv.row(r), qv.row(r));
  return tape->Push(OpKind::kKlRows, Tensor(1, 1, total), {p.id(), q.id()});
}

}  // namespace compsyn::ad
