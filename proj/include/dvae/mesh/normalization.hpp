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

#include <span>

#include <json.hpp>

#include "dvae/mesh/mesh.hpp"

namespace dvae::mesh {

/// Per-coordinate z-scoring fitted on a training population.
class NormalizationStats {
 public:
  static constexpr double kStdFloor = 1e-8;

  NormalizationStats() = default;
  NormalizationStats(Matrix mean, Matrix stddev);

  /// Throws ContractViolation on an empty set or inconsistent shapes.
  static NormalizationStats fit(std::span<const Matrix> training);

  Matrix apply(const Matrix& coords) const;
  Matrix invert(const Matrix& normalized) const;

  const Matrix& mean() const { return mean_; }
  const Matrix& stddev() const { return stddev_; }
  Index vertex_count() const { return mean_.rows(); }

  nlohmann::json to_json() const;
  static NormalizationStats from_json(const nlohmann::json& j);

 private:
  Matrix mean_;
  Matrix stddev_;  // already floored
};

}  // namespace dvae::mesh
