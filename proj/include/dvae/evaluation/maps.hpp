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

#include <cstdint>
#include <vector>

#include "dvae/ad/parameters.hpp"

namespace dvae::evaluation {

/// Per vertex i, the mean over k of |a_k,i - b_k,i|. Inputs are paired.
std::vector<double> local_distance_map(const std::vector<ad::Matrix>& a,
                                       const std::vector<ad::Matrix>& b);

/// Share of the map's total mass on the listed vertices.
double mass_fraction(const std::vector<double>& map,
                     const std::vector<std::int64_t>& vertices);

/// Pearson correlation of two equally long maps.
double map_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace dvae::evaluation
