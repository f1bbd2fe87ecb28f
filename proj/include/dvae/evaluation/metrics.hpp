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

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvae/mesh/normalization.hpp"
#include "dvae/model/models.hpp"
#include "dvae/training/dataset.hpp"

namespace dvae::evaluation {

/// Rates are percentages; re is in raw coordinate units.
struct FoldMetrics {
  double ca = 0.0;
  double osrsr = 0.0;
  double ssrsr = 0.0;
  double re = 0.0;
  std::size_t samples = 0;
};

/// Per-fold values plus mean and sample standard deviation across folds.
struct MetricsReport {
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  FoldMetrics stddev;

  static MetricsReport aggregate(std::vector<FoldMetrics> folds);
  nlohmann::json to_json() const;
};

/// CA from q0, OSRSR/SSRSR judged by `classifier`, RE between each mesh and
/// its same-class reconstruction after denormalization. True labels feed the
/// latent computation.
FoldMetrics compute_metrics(const model::DvaeModel& dvae,
                            const model::Classifier& classifier,
                            const training::LabeledSet& test,
                            const mesh::NormalizationStats& stats,
                            std::size_t jobs = 1);

/// Mean over subjects of the mean per-vertex distance, both in raw units.
double reconstruction_error(const std::vector<ad::Matrix>& originals,
                            const std::vector<ad::Matrix>& reconstructions);

/// Fraction of samples where C applied to the same-class reconstruction made
/// with q0's estimated label agrees with that estimate.
double consistency_check(const model::DvaeModel& dvae,
                         const model::Classifier& classifier,
                         const training::LabeledSet& test, std::size_t jobs = 1);

}  // namespace dvae::evaluation
