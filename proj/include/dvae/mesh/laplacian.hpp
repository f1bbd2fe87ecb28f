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

#include <vector>

#include "dvae/mesh/mesh.hpp"

namespace dvae::mesh {

/// L = I - D^{-1/2} A D^{-1/2} over the edge graph of `conn`.
/// Throws GeometryError for a vertex without edges.
SparseMatrix normalized_laplacian(const TemplateConnectivity& conn);

/// (2 / lambda_max) L - I. The default bound 2 is valid for any normalized
/// Laplacian, so the result has spectrum inside [-1, 1].
SparseMatrix scale_laplacian(const SparseMatrix& laplacian,
                             double lambda_max = 2.0);

/// T_0(L)x ... T_{K-1}(L)x via the three-term recurrence.
std::vector<Matrix> chebyshev_stack(const SparseMatrix& scaled_laplacian,
                                    const Matrix& x, int order);

}  // namespace dvae::mesh
