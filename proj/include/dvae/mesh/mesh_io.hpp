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
#include <optional>
#include <vector>

#include "dvae/mesh/mesh.hpp"

namespace dvae::mesh {

enum class MeshFormat { kObj, kPly };

struct RawMesh {
  Matrix vertices;  // N x 3
  std::vector<Triangle> faces;
  std::vector<double> quality;  // optional per-vertex scalar (PLY only)
};

/// Format from the file extension (.obj / .ply); throws FormatError otherwise.
MeshFormat format_from_path(const std::filesystem::path& path);

/// Throws ParseError (with line or record number) on malformed input; faces
/// are validated against the vertex count before anything is returned.
RawMesh read_mesh(const std::filesystem::path& path);
RawMesh read_mesh(const std::filesystem::path& path, MeshFormat format);

/// OBJ: ASCII, 6 decimals. PLY: binary little-endian, double coordinates, an
/// optional per-vertex "quality" property.
void write_mesh(const std::filesystem::path& path, const RawMesh& mesh,
                MeshFormat format);
void write_mesh(const std::filesystem::path& path, const RawMesh& mesh);

/// Loads a subject mesh bound to `tmpl`; throws CorrespondenceError if the
/// vertex count differs from the template.
CorrespondedMesh load_mesh(const std::filesystem::path& path,
                           const ConnectivityPtr& tmpl);
void save_mesh(const std::filesystem::path& path, const CorrespondedMesh& mesh,
               std::optional<MeshFormat> format = std::nullopt);

/// PLY with a per-vertex scalar for viewer colorization.
void save_scalar_map(const std::filesystem::path& path, const Matrix& coords,
                     const std::vector<Triangle>& faces,
                     const std::vector<double>& values);

}  // namespace dvae::mesh
