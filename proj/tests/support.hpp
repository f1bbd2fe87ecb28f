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

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "dvae/ad/parameters.hpp"
#include "dvae/common/rng.hpp"
#include "dvae/mesh/hierarchy.hpp"
#include "dvae/mesh/mesh.hpp"

namespace dvae::testing {

using ad::Index;
using ad::Matrix;
using mesh::Triangle;

inline Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

struct ToyMesh {
  Matrix coords;
  std::vector<Triangle> faces;
};

/// Regular icosahedron, 12 vertices and 20 faces, outward orientation.
inline ToyMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  ToyMesh m;
  m.coords.resize(12, 3);
  m.coords << -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, 0,  //
      0, -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t,          //
      t, 0, -1, t, 0, 1, -t, 0, -1, -t, 0, 1;
  m.coords.rowwise().normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

/// rows x cols vertex grid in the plane, each quad split along a random
/// diagonal, with a little out-of-plane jitter.
inline ToyMesh random_grid_mesh(int rows, int cols, Rng& rng) {
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::bernoulli_distribution flip(0.5);
  ToyMesh m;
  m.coords.resize(rows * cols, 3);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m.coords.row(r * cols + c) << c + jitter(rng), r + jitter(rng), jitter(rng);
    }
  }
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      const std::int64_t a = r * cols + c, b = a + 1, d = a + cols, e = d + 1;
      if (flip(rng)) {
        m.faces.push_back({a, b, e});
        m.faces.push_back({a, e, d});
      } else {
        m.faces.push_back({a, b, d});
        m.faces.push_back({b, e, d});
      }
    }
  }
  return m;
}

/// 12 -> 6 -> 4 hierarchy on the icosahedron.
inline std::shared_ptr<const mesh::SamplingHierarchy> toy_hierarchy() {
  const ToyMesh m = icosahedron();
  const mesh::TemplateConnectivity conn(12, m.faces);
  const int factors[] = {2, 2};
  return std::make_shared<const mesh::SamplingHierarchy>(
      mesh::build_sampling_hierarchy(m.coords, conn, factors));
}

/// Central-difference gradient of a scalar function.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, Matrix x,
                               double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  for (Index i = 0; i < x.size(); ++i) {
    const double keep = x.data()[i];
    x.data()[i] = keep + h;
    const double up = f(x);
    x.data()[i] = keep - h;
    const double down = f(x);
    x.data()[i] = keep;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_relative_error(const Matrix& analytic, const Matrix& numeric,
                                 double floor = 1e-8) {
  double worst = 0.0;
  for (Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i], n = numeric.data()[i];
    worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}));
  }
  return worst;
}

/// Twelve-vertex population on the icosahedron whose class pushes vertices 0
/// and 3 outward.
struct ToyPopulation {
  std::vector<Matrix> raw;
  std::vector<int> labels;
};

inline ToyPopulation toy_population(int n, Rng& rng) {
  const auto ico = icosahedron();
  std::normal_distribution<double> noise(0.0, 0.02);
  ToyPopulation pop;
  for (int k = 0; k < n; ++k) {
    Matrix m = ico.coords * (1.0 + 5.0 * noise(rng));
    const int y = k % 2;
    if (y == 1) {
      m.row(0) *= 1.4;
      m.row(3) *= 1.4;
    }
    for (Index i = 0; i < m.size(); ++i) m.data()[i] += noise(rng);
    pop.raw.push_back(m);
    pop.labels.push_back(y);
  }
  return pop;
}

}  // namespace dvae::testing
