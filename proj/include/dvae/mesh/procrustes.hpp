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

#include <Eigen/Dense>

#include "dvae/mesh/mesh.hpp"

namespace dvae::mesh {

/// x -> s R x + t with s > 0 and det(R) = +1.
struct SimilarityTransform {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Matrix apply(const Matrix& points) const;
  SimilarityTransform inverse() const;
};

struct Alignment {
  SimilarityTransform transform;
  Matrix aligned;         // transform applied to the source
  double residual = 0.0;  // mean per-vertex distance to the target
};

/// Least-squares similarity transform taking `source` onto `target`
/// (corresponding rows). Throws GeometryError when either shape collapses to
/// a point and ContractViolation when row counts differ.
Alignment procrustes_align(const Matrix& source, const Matrix& target);

}  // namespace dvae::mesh
