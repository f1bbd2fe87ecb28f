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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvae/common/rng.hpp"
#include "dvae/mesh/mesh.hpp"
#include "dvae/mesh/procrustes.hpp"

namespace dvae::synthetic {

using mesh::Index;
using mesh::Matrix;
using mesh::Triangle;

inline constexpr int kNuisanceModes = 4;

/// Knobs of the synthetic population. Lengths are in template units ("mm").
struct PopulationSpec {
  int subdivisions = 3;            // 642 template vertices
  std::size_t n_subjects = 600;
  double class_ratio = 0.5;        // fraction with label 1
  double scale = 50.0;             // template half-extent
  double noise_fraction = 0.005;   // noise sigma / scale
  double nuisance_fraction = 0.06; // displacement per unit coefficient / scale
  bool nuisance = true;
  double region_radius = 0.7;      // angular radius of each patch (rad)
  double class_rim = 8.0;          // class displacement at the patch rim, in sigma
  double class_peak = 40.0;        // at the patch centre, in sigma

  double noise_sigma() const { return noise_fraction * scale; }
  nlohmann::json to_json() const;
  /// Rejects unknown keys.
  static PopulationSpec from_json(const nlohmann::json& j);
};

struct LabeledSample {
  std::size_t id = 0;
  int label = 0;
  Matrix coords;
  std::array<double, kNuisanceModes> nuisance{};
};

/// Template, deterministic fields and the drawn subjects. Each subject is
/// template + sum_k c_k * nuisance_field[k] + label * class_field + noise.
struct Population {
  PopulationSpec spec;
  std::uint64_t seed = 0;
  Matrix template_coords;
  std::vector<Triangle> faces;
  std::array<std::vector<std::int64_t>, 2> patches;  // the two parts of R
  std::vector<std::int64_t> region;                  // R, ascending
  Matrix class_field;
  std::array<Matrix, kNuisanceModes> nuisance_fields;
  std::vector<LabeledSample> samples;

  /// The subject without generator noise.
  Matrix clean_mesh(const LabeledSample& s) const;
  std::vector<bool> region_mask() const;
};

/// Subdivided icosahedron on the unit sphere: 12, 42, 162, 642, ... vertices.
void icosphere(int subdivisions, Matrix& vertices, std::vector<Triangle>& faces);

Population generate(const PopulationSpec& spec, std::uint64_t seed);

/// Random rotation, scale in [0.8, 1.25] and translation in [-10, 10]^3,
/// applied in place. Returns the transform.
mesh::SimilarityTransform pre_alignment_perturb(Matrix& coords, Rng& rng);

/// Writes template.ply, subject_NNNN.ply, manifest.json and regions.json.
void write_dataset(const std::filesystem::path& dir, const Population& pop);

/// Subjects and labels as stored on disk, with the template and region.
struct Dataset {
  Matrix template_coords;
  std::vector<Triangle> faces;
  std::vector<std::int64_t> region;
  std::vector<Matrix> meshes;
  std::vector<int> labels;
  std::vector<std::size_t> ids;
  double noise_sigma = 0.0;
};
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace dvae::synthetic
