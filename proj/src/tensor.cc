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

#include "compsyn/tensor.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "compsyn/errors.h"

namespace compsyn {

namespace {

size_t Product(const std::vector<size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), size_t{1},
                         std::multiplies<>());
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.ShapeString() +
                     " vs " + b.ShapeString());
  }
}

void RequireProbabilityRow(std::span<const double> p, const char* which) {
  double total = 0.0;
  for (double x : p) {
    if (x < 0.0 || !std::isfinite(x)) {
      throw DataError(std::string("kl_row: ") + which +
                      " has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DataError(std::string("kl_row: ") + which + " row sums to " +
                    std::to_string(total) + ", expected 1");
  }
}

}  // namespace

std::string ShapeString(const std::vector<size_t>& shape) {
  std::string out = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(size_t rows, size_t cols, double fill)
    : shape_{rows, cols}, data_(rows * cols, fill) {}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty() || shape_.size() > 2) {
    throw ShapeError("tensor rank must be 1 or 2, got " +
                     std::to_string(shape_.size()));
  }
  if (Product(shape_) != data_.size()) {
    throw ShapeError("shape " + compsyn::ShapeString(shape_) +
                     " does not match " + std::to_string(data_.size()) +
                     " values");
  }
}

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const size_t n = rows.size();
  const size_t m = n ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw ShapeError("ragged rows in Tensor::FromRows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n, m}, std::move(data));
}

Tensor Tensor::Row(std::vector<double> values) {
  const size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::Identity(size_t n) {
  Tensor t(n, n);
  for (size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::span<const double> Tensor::row(size_t r) const {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

bool Tensor::SameShape(const Tensor& other) const {
  return rows() == other.rows() && cols() == other.cols();
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

std::string Tensor::ShapeString() const {
  return compsyn::ShapeString(shape_);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree " + a.ShapeString() +
                     " x " + b.ShapeString());
  }
  const size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(m, n);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += a(i, p) * b(p, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "add");
  Tensor out = a;
  for (size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = a;
  for (double& x : out.storage()) x *= factor;
  return out;
}

Tensor relu(const Tensor& a) {
  Tensor out = a;
  for (double& x : out.storage()) x = std::max(0.0, x);
  return out;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const size_t rows = parts.front().rows();
  size_t cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) {
      throw ShapeError("concat_rows: row count mismatch " +
                       parts.front().ShapeString() + " vs " + p.ShapeString());
    }
    cols += p.cols();
  }
  Tensor out(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    size_t offset = 0;
    for (const Tensor& p : parts) {
      for (size_t c = 0; c < p.cols(); ++c) out(r, offset + c) = p(r, c);
      offset += p.cols();
    }
  }
  return out;
}

Tensor concat_rows(std::initializer_list<Tensor> parts) {
  return concat_rows(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor row_softmax(const Tensor& a) {
  Tensor out = a;
  const size_t n = a.cols();
  for (size_t r = 0; r < a.rows(); ++r) {
    double* row = out.data().data() + r * n;
    const double peak = *std::max_element(row, row + n);
    double total = 0.0;
    for (size_t c = 0; c < n; ++c) {
      row[c] = std::exp(row[c] - peak);
      total += row[c];
    }
    for (size_t c = 0; c < n; ++c) row[c] /= total;
  }
  return out;
}

double mse(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "mse");
  if (a.empty()) throw ShapeError("mse: empty tensors");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double kl_row(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ShapeError("kl_row: length mismatch " + std::to_string(p.size()) +
                     " vs " + std::to_string(q.size()));
  }
  RequireProbabilityRow(p, "p");
  RequireProbabilityRow(q, "q");
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i] * std::log((p[i] + kKlEpsilon) / (q[i] + kKlEpsilon));
  }
  return acc;
}

double kl_row(const Tensor& p, const Tensor& q) {
  if (p.rows() != 1 || q.rows() != 1) {
    throw ShapeError("kl_row: expected single rows, got " + p.ShapeString() +
                     " and " + q.ShapeString());
  }
  return kl_row(p.data(), q.data());
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

}  // namespace compsyn
