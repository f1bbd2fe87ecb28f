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

#include <filesystem>
#include <span>
#include <vector>

#include "dvae/mesh/mesh.hpp"

namespace dvae::mesh {

/// Multi-resolution operators for mesh pooling. Level 0 is the template.
struct SamplingHierarchy {
  std::vector<std::size_t> vertex_counts;     // levels() + 1 entries
  std::vector<SparseMatrix> laplacians;       // scaled, levels() + 1 entries
  std::vector<SparseMatrix> down;             // N_{l+1} x N_l selection
  std::vector<SparseMatrix> up;               // N_l x N_{l+1} barycentric
  std::vector<std::vector<Triangle>> faces;   // connectivity per level

  std::size_t levels() const { return down.size(); }
};

/// Result of collapsing a mesh down to a target vertex count.
struct Decimation {
  std::vector<std::int64_t> kept;  // indices into the input, ascending
  std::vector<Triangle> faces;     // indices into `kept`
};

/// Quadric-error-metric edge collapse. Each collapse merges one endpoint into
/// the other (no repositioning), so the survivors are a subset of the input.
Decimation decimate_qem(const Matrix& coords, const std::vector<Triangle>& faces,
                        std::size_t target_vertices);

/// Builds one level per factor; level l+1 keeps max(4, ceil(N_l / f)) vertices.
/// Throws ContractViolation for factors < 1 and GeometryError if a level would
/// fall below 4 vertices.
SamplingHierarchy build_sampling_hierarchy(const Matrix& template_coords,
                                           const TemplateConnectivity& conn,
                                           std::span<const int> factors);

/// Binary cache: "DVAEHIER", version byte, then COO matrices (u64 indices,
/// f64 values, little-endian).
inline constexpr unsigned char kHierarchyFormatVersion = 1;
void save_hierarchy(const std::filesystem::path& path,
                    const SamplingHierarchy& hierarchy);
SamplingHierarchy load_hierarchy(const std::filesystem::path& path);

}  // namespace dvae::mesh
