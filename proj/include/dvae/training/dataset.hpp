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

#include <cstddef>
#include <vector>

#include "dvae/ad/parameters.hpp"
#include "dvae/mesh/normalization.hpp"

namespace dvae::training {

using ad::Matrix;

/// Normalized meshes with their labels, index-aligned.
struct LabeledSet {
  std::vector<Matrix> x;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  void push_back(Matrix mesh, int label) {
    x.push_back(std::move(mesh));
    y.push_back(label);
  }
};

/// Subset by index, preserving the order of `indices`.
LabeledSet subset(const LabeledSet& set, const std::vector<std::size_t>& indices);

/// Applies per-coordinate normalization to raw meshes.
LabeledSet normalize(const std::vector<Matrix>& raw, const std::vector<int>& labels,
                     const mesh::NormalizationStats& stats);

}  // namespace dvae::training
