// Copyright 2026 The dvae-mesh Authors.
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

#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace dvae::ad {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

/// True iff every entry is finite. x - x is 0 for finite x and NaN
/// otherwise, so a single vectorized reduction suffices.
template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return (m.derived().array() - m.derived().array()).sum() == 0.0;
}

struct ParamId {
  std::size_t index = 0;
  auto operator<=>(const ParamId&) const = default;
};

struct Parameter {
  std::string name;
  Matrix value;
};

/// Ordered collection of trainable arrays. Declaration order is the
/// serialization order used by checkpoints.
class ParameterSet {
 public:
  ParamId add(std::string name, Matrix init);

  Parameter& operator[](ParamId id) { return params_.at(id.index); }
  const Parameter& operator[](ParamId id) const { return params_.at(id.index); }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
};

/// Gradient map over a ParameterSet; entry i matches parameter i in shape.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ParameterSet& like);

  Matrix& operator[](ParamId id) { return grads_.at(id.index); }
  const Matrix& operator[](ParamId id) const { return grads_.at(id.index); }
  std::size_t size() const { return grads_.size(); }

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double factor);

  double max_abs() const;
  bool all_finite() const;

 private:
  std::vector<Matrix> grads_;
};

}  // namespace dvae::ad
