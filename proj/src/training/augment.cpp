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

#include "dvae/training/augment.hpp"

#include "dvae/common/error.hpp"

namespace dvae::training {

std::string to_string(Side side) {
  switch (side) {
    case Side::kLeft: return "left";
    case Side::kRight: return "right";
    case Side::kFront: return "front";
    case Side::kRear: return "rear";
    case Side::kLower: return "lower";
    case Side::kUpper: return "upper";
  }
  return "unknown";
}

Side side_from_string(const std::string& name) {
  for (Side s : kAllSides) {
    if (to_string(s) == name) return s;
  }
  throw ContractViolation("unknown side '" + name + "'");
}

int axis_of(Side side) {
  switch (side) {
    case Side::kLeft:
    case Side::kRight: return 0;
    case Side::kFront:
    case Side::kRear: return 1;
    case Side::kLower:
    case Side::kUpper: return 2;
  }
  return 0;
}

bool is_low_side(Side side) {
  return side == Side::kLeft || side == Side::kFront || side == Side::kLower;
}

MaskDraw draw_mask(const MissingDataPolicy& policy, Rng& rng) {
  DVAE_REQUIRE(policy.keep_probability >= 0.0 && policy.keep_probability <= 1.0,
               "keep probability must lie in [0, 1]");
  DVAE_REQUIRE(policy.max_fraction >= 0.0 && policy.max_fraction <= 1.0,
               "max fraction must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MaskDraw d;
  if (unit(rng) < policy.keep_probability) return d;
  d.keep = false;
  d.side = kAllSides[std::uniform_int_distribution<int>(0, 5)(rng)];
  d.fraction = policy.max_fraction * unit(rng);
  return d;
}

std::vector<bool> band_vertices(const Matrix& raw, Side side, double fraction) {
  DVAE_REQUIRE(raw.cols() == 3 && raw.rows() > 0, "band_vertices: expects N x 3");
  DVAE_REQUIRE(fraction >= 0.0 && fraction <= 1.0, "fraction must lie in [0, 1]");
  const auto col = raw.col(axis_of(side));
  const double lo = col.minCoeff();
  const double hi = col.maxCoeff();
  const double width = fraction * (hi - lo);
  std::vector<bool> band(static_cast<std::size_t>(raw.rows()), false);
  for (ad::Index i = 0; i < raw.rows(); ++i) {
    band[static_cast<std::size_t>(i)] =
        is_low_side(side) ? col(i) < lo + width : col(i) > hi - width;
  }
  return band;
}

Matrix mask_band(const Matrix& normalized, const Matrix& raw, Side side,
                 double fraction) {
  DVAE_REQUIRE(normalized.rows() == raw.rows() && normalized.cols() == raw.cols(),
               "mask_band: shape mismatch");
  const auto band = band_vertices(raw, side, fraction);
  Matrix out = normalized;
  for (ad::Index i = 0; i < out.rows(); ++i) {
    if (band[static_cast<std::size_t>(i)]) out.row(i).setZero();
  }
  return out;
}

Matrix augment_missing(const Matrix& normalized,
                       const mesh::NormalizationStats& stats,
                       const MissingDataPolicy& policy, Rng& rng,
                       MaskDraw* drawn) {
  const MaskDraw d = draw_mask(policy, rng);
  if (drawn) *drawn = d;
  if (d.keep || d.fraction == 0.0) return normalized;
  return mask_band(normalized, stats.invert(normalized), d.side, d.fraction);
}

}  // namespace dvae::training
