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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "dvae/ad/parameters.hpp"

namespace dvae::mesh {

using ad::Index;
using ad::Matrix;
using ad::SparseMatrix;

using Triangle = std::array<std::int64_t, 3>;
using Edge = std::pair<std::int64_t, std::int64_t>;

/// Triangle list shared by every subject of a corresponded population.
class TemplateConnectivity {
 public:
  /// Throws ContractViolation if an index is out of range or a vertex is
  /// never referenced.
  TemplateConnectivity(std::size_t vertex_count, std::vector<Triangle> triangles);

  std::size_t vertex_count() const { return vertex_count_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  /// Undirected edges (i < j), sorted and unique.
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::size_t vertex_count_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
};

using ConnectivityPtr = std::shared_ptr<const TemplateConnectivity>;

/// Subject mesh: row i is template vertex i.
struct CorrespondedMesh {
  Matrix coords;  // N x 3
  ConnectivityPtr connectivity;
  std::optional<int> label;

  Index vertex_count() const { return coords.rows(); }
};

/// Mean per-vertex Euclidean distance between two N x 3 arrays.
double mean_vertex_distance(const Matrix& a, const Matrix& b);

}  // namespace dvae::mesh
