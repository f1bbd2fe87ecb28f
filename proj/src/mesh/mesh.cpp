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

#include "dvae/mesh/mesh.hpp"

#include <algorithm>
#include <string>

#include "dvae/common/error.hpp"

namespace dvae::mesh {

TemplateConnectivity::TemplateConnectivity(std::size_t vertex_count,
                                           std::vector<Triangle> triangles)
    : vertex_count_(vertex_count), triangles_(std::move(triangles)) {
  DVAE_REQUIRE(vertex_count_ > 0 && !triangles_.empty(),
               "TemplateConnectivity: empty mesh");
  std::vector<bool> used(vertex_count_, false);
  edges_.reserve(triangles_.size() * 3);
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const auto v = t[k];
      DVAE_REQUIRE(v >= 0 && static_cast<std::size_t>(v) < vertex_count_,
                   "TemplateConnectivity: vertex index " + std::to_string(v) +
                       " out of range");
      used[v] = true;
      const auto w = t[(k + 1) % 3];
      if (v != w) edges_.emplace_back(std::min(v, w), std::max(v, w));
    }
  }
  for (std::size_t i = 0; i < vertex_count_; ++i) {
    DVAE_REQUIRE(used[i], "TemplateConnectivity: vertex " + std::to_string(i) +
                              " is not referenced by any triangle");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

double mean_vertex_distance(const Matrix& a, const Matrix& b) {
  DVAE_REQUIRE(a.rows() == b.rows() && a.cols() == b.cols(),
               "mean_vertex_distance: shape mismatch");
  return (a - b).rowwise().norm().mean();
}

}  // namespace dvae::mesh
