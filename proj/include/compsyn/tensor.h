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

#ifndef COMPSYN_TENSOR_H_
#define COMPSYN_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace compsyn {

// Dense row-major tensor of doubles, rank 1 or 2. A rank-1 tensor of length
// n behaves as a 1 x n row wherever a matrix is expected.
class Tensor {
 public:
  Tensor() = default;
  Tensor(size_t rows, size_t cols, double fill = 0.0);
  Tensor(std::vector<size_t> shape, std::vector<double> data);

  // Nested-list construction for tests and fixtures: {{1, 2}, {3, 4}}.
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Row(std::vector<double> values);
  static Tensor Identity(size_t n);

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
  size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols() + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols() + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> row(size_t r) const;
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool SameShape(const Tensor& other) const;
  bool AllFinite() const;
  std::string ShapeString() const;

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

std::string ShapeString(const std::vector<size_t>& shape);

// Probability-floor used by KL divergences.
inline constexpr double kKlEpsilon = 1e-12;

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor relu(const Tensor& a);
// Horizontal concatenation of equally tall blocks, left to right.
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_rows(std::initializer_list<Tensor> parts);
Tensor row_softmax(const Tensor& a);
// Mean of squared differences over all entries.
double mse(const Tensor& a, const Tensor& b);
// Directed KL(p || q) in nats between two probability rows.
double kl_row(std::span<const double> p, std::span<const double> q);
double kl_row(const Tensor& p, const Tensor& q);

double max_abs_diff(const Tensor& a, const Tensor& b);
double squared_norm(std::span<const double> v);

}  // namespace compsyn

#endif  // COMPSYN_TENSOR_H_
