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

#include "dvae/mesh/procrustes.hpp"

#include <cmath>

#include "dvae/common/error.hpp"

namespace dvae::mesh {

Matrix SimilarityTransform::apply(const Matrix& points) const {
  DVAE_REQUIRE(points.cols() == 3, "SimilarityTransform::apply: need N x 3");
  Matrix out = (scale * (points * rotation.transpose()));
  out.rowwise() += translation.transpose();
  return out;
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.transpose();
  inv.translation = -inv.scale * (inv.rotation * translation);
  return inv;
}

Alignment procrustes_align(const Matrix& source, const Matrix& target) {
  DVAE_REQUIRE(source.rows() == target.rows() && source.cols() == 3 &&
                   target.cols() == 3,
               "procrustes_align: shapes must be equal N x 3");
  DVAE_REQUIRE(source.rows() > 0, "procrustes_align: empty point set");
  const double n = static_cast<double>(source.rows());
  const Eigen::RowVector3d mu_s = source.colwise().mean();
  const Eigen::RowVector3d mu_t = target.colwise().mean();
  const Matrix sc = source.rowwise() - mu_s;
  const Matrix tc = target.rowwise() - mu_t;

  const double ss = sc.squaredNorm() / n;
  const double st = tc.squaredNorm() / n;
  const double tiny = 1e-24 * std::max(1.0, mu_s.squaredNorm() + mu_t.squaredNorm());
  if (ss <= tiny || st <= tiny) {
    throw GeometryError("procrustes_align: degenerate shape (all points coincide)");
  }

  const Eigen::Matrix3d cov = tc.transpose() * sc / n;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d(2, 2) = -1.0;

  Alignment result;
  auto& tr = result.transform;
  tr.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  tr.scale = (svd.singularValues().asDiagonal() * d).trace() / ss;
  tr.translation = mu_t.transpose() - tr.scale * tr.rotation * mu_s.transpose();
  result.aligned = tr.apply(source);
  result.residual = mean_vertex_distance(result.aligned, target);
  return result;
}

}  // namespace dvae::mesh
