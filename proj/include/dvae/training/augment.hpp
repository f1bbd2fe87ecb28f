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
#include <optional>
#include <string>
#include <vector>

#include "dvae/ad/parameters.hpp"
#include "dvae/common/rng.hpp"
#include "dvae/mesh/normalization.hpp"

namespace dvae::training {

using ad::Matrix;

/// Side of the bounding box a band is removed from, with its axis.
enum class Side { kLeft, kRight, kFront, kRear, kLower, kUpper };

inline constexpr std::array<Side, 6> kAllSides{Side::kLeft,  Side::kRight,
                                               Side::kFront, Side::kRear,
                                               Side::kLower, Side::kUpper};

std::string to_string(Side side);
Side side_from_string(const std::string& name);
int axis_of(Side side);           // 0 = x, 1 = y, 2 = z
bool is_low_side(Side side);      // left, front, lower

struct MissingDataPolicy {
  double keep_probability = 0.6;
  double max_fraction = 0.4;
};

struct MaskDraw {
  bool keep = true;
  Side side = Side::kLower;
  double fraction = 0.0;
};

MaskDraw draw_mask(const MissingDataPolicy& policy, Rng& rng);

/// Vertices of `raw` whose coordinate along the side's axis falls in the
/// extremal band of relative extent `fraction` (strict inequality, so a zero
/// fraction removes nothing).
std::vector<bool> band_vertices(const Matrix& raw, Side side, double fraction);

/// Sets the band's vertices of a normalized mesh to zero, i.e. to the
/// per-vertex training mean. The band is measured on `raw`.
Matrix mask_band(const Matrix& normalized, const Matrix& raw, Side side,
                 double fraction);

/// Draws from `policy` and masks accordingly; geometry comes from inverting
/// the normalization.
Matrix augment_missing(const Matrix& normalized,
                       const mesh::NormalizationStats& stats,
                       const MissingDataPolicy& policy, Rng& rng,
                       MaskDraw* drawn = nullptr);

}  // namespace dvae::training
