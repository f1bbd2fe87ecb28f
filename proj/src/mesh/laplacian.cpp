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

#include "dvae/mesh/laplacian.hpp"

#include <cmath>
#include <string>

#include "dvae/common/error.hpp"

namespace dvae::mesh {

SparseMatrix normalized_laplacian(const TemplateConnectivity& conn) {
  const auto n = static_cast<Index>(conn.vertex_count());
  std::vector<double> degree(n, 0.0);
  for (const auto& [i, j] : conn.edges()) {
    degree[i] += 1.0;
    degree[j] += 1.0;
  }
  for (Index i = 0; i < n; ++i) {
    if (degree[i] == 0.0) {
      throw GeometryError("normalized_laplacian: vertex " + std::to_string(i) +
                          " has degree zero");
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n + 2 * conn.edges().size());
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
  for (const auto& [i, j] : conn.edges()) {
    const double w = -1.0 / std::sqrt(degree[i] * degree[j]);
    triplets.emplace_back(i, j, w);
    triplets.emplace_back(j, i, w);
  }
  SparseMatrix l(n, n);
  l.setFromTriplets(triplets.begin(), triplets.end());
  return l;
}

SparseMatrix scale_laplacian(const SparseMatrix& laplacian, double lambda_max) {
  DVAE_REQUIRE(laplacian.rows() == laplacian.cols(),
               "scale_laplacian: matrix must be square");
  DVAE_REQUIRE(lambda_max > 0.0, "scale_laplacian: lambda_max must be positive");
  SparseMatrix eye(laplacian.rows(), laplacian.cols());
  eye.setIdentity();
  SparseMatrix scaled = (2.0 / lambda_max) * laplacian - eye;
  scaled.prune(0.0);
  return scaled;
}

std::vector<Matrix> chebyshev_stack(const SparseMatrix& scaled_laplacian,
                                    const Matrix& x, int order) {
  DVAE_REQUIRE(order >= 1, "chebyshev_stack: order must be >= 1");
  DVAE_REQUIRE(scaled_laplacian.rows() == scaled_laplacian.cols() &&
                   scaled_laplacian.cols() == x.rows(),
               "chebyshev_stack: operator does not match input rows");
  std::vector<Matrix> out;
  out.reserve(order);
  out.push_back(x);
  if (order > 1) out.push_back(scaled_laplacian * x);
  for (int k = 2; k < order; ++k) {
    out.push_back(2.0 * (scaled_laplacian * out[k - 1]) - out[k - 2]);
  }
  return out;
}

}  // namespace dvae::mesh
