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

#include "dvae/evaluation/maps.hpp"

#include <cmath>

#include "dvae/common/error.hpp"

namespace dvae::evaluation {

std::vector<double> local_distance_map(const std::vector<ad::Matrix>& a,
                                       const std::vector<ad::Matrix>& b) {
  DVAE_REQUIRE(!a.empty() && a.size() == b.size(),
               "local_distance_map: lists must be paired and non-empty");
  const auto n = a.front().rows();
  std::vector<double> map(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    DVAE_REQUIRE(a[k].rows() == n && b[k].rows() == n && a[k].cols() == b[k].cols(),
                 "local_distance_map: mesh shapes differ");
    for (ad::Index i = 0; i < n; ++i) {
      map[static_cast<std::size_t>(i)] += (a[k].row(i) - b[k].row(i)).norm();
    }
  }
  for (double& v : map) v /= static_cast<double>(a.size());
  return map;
}

double mass_fraction(const std::vector<double>& map,
                     const std::vector<std::int64_t>& vertices) {
  double total = 0.0;
  for (double v : map) total += v;
  DVAE_REQUIRE(total > 0.0, "mass_fraction: map has no mass");
  double inside = 0.0;
  for (auto i : vertices) {
    DVAE_REQUIRE(i >= 0 && static_cast<std::size_t>(i) < map.size(),
                 "mass_fraction: vertex out of range");
    inside += map[static_cast<std::size_t>(i)];
  }
  return inside / total;
}

double map_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  DVAE_REQUIRE(a.size() == b.size() && a.size() > 1,
               "map_correlation: maps must have equal length > 1");
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::Map<const Eigen::VectorXd> x(a.data(), n), y(b.data(), n);
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double denom = dx.norm() * dy.norm();
  return denom > 0.0 ? dx.dot(dy) / denom : 0.0;
}

}  // namespace dvae::evaluation
