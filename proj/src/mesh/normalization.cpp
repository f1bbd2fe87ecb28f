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

#include "dvae/mesh/normalization.hpp"

#include "dvae/common/error.hpp"

namespace dvae::mesh {

NormalizationStats::NormalizationStats(Matrix mean, Matrix stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  DVAE_REQUIRE(mean_.rows() == stddev_.rows() && mean_.cols() == stddev_.cols(),
               "NormalizationStats: mean and stddev shapes differ");
  stddev_ = stddev_.cwiseMax(kStdFloor);
}

NormalizationStats NormalizationStats::fit(std::span<const Matrix> training) {
  DVAE_REQUIRE(!training.empty(), "NormalizationStats::fit: empty training set");
  const Index rows = training.front().rows(), cols = training.front().cols();
  Matrix mean = Matrix::Zero(rows, cols);
  for (const auto& m : training) {
    DVAE_REQUIRE(m.rows() == rows && m.cols() == cols,
                 "NormalizationStats::fit: meshes differ in shape");
    mean += m;
  }
  const double n = static_cast<double>(training.size());
  mean /= n;
  Matrix var = Matrix::Zero(rows, cols);
  for (const auto& m : training) var += (m - mean).cwiseAbs2();
  var /= n;
  return NormalizationStats(std::move(mean), var.cwiseSqrt());
}

Matrix NormalizationStats::apply(const Matrix& coords) const {
  DVAE_REQUIRE(coords.rows() == mean_.rows() && coords.cols() == mean_.cols(),
               "NormalizationStats::apply: shape mismatch");
  return (coords - mean_).cwiseQuotient(stddev_);
}

Matrix NormalizationStats::invert(const Matrix& normalized) const {
  DVAE_REQUIRE(normalized.rows() == mean_.rows() &&
                   normalized.cols() == mean_.cols(),
               "NormalizationStats::invert: shape mismatch");
  return normalized.cwiseProduct(stddev_) + mean_;
}

nlohmann::json NormalizationStats::to_json() const {
  auto flat = [](const Matrix& m) {
    return std::vector<double>(m.data(), m.data() + m.size());
  };
  return {{"vertices", mean_.rows()},
          {"mean", flat(mean_)},
          {"stddev", flat(stddev_)}};
}

NormalizationStats NormalizationStats::from_json(const nlohmann::json& j) {
  const auto n = j.at("vertices").get<Index>();
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto sd = j.at("stddev").get<std::vector<double>>();
  if (static_cast<Index>(mean.size()) != 3 * n ||
      static_cast<Index>(sd.size()) != 3 * n) {
    throw FormatError("normalization stats: array length does not match vertex count");
  }
  return NormalizationStats(Eigen::Map<const Matrix>(mean.data(), n, 3),
                            Eigen::Map<const Matrix>(sd.data(), n, 3));
}

}  // namespace dvae::mesh
