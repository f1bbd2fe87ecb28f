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
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvae/evaluation/metrics.hpp"
#include "dvae/model/networks.hpp"
#include "dvae/training/trainer.hpp"

namespace dvae::evaluation {

/// Candidate hyperparameters; every (alpha, sqrt v) pair is tried.
struct HyperGrid {
  std::vector<double> alphas{0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> sqrt_v{0.7, 1.0, 1.3, 1.6, 1.9};

  std::size_t size() const { return alphas.size() * sqrt_v.size(); }
};

struct FoldPlan {
  int outer_folds = 5;
  double validation_fraction = 0.2;
  std::uint64_t seed = 1;
};

/// Stratified partition of [0, n) into k folds; within each class the
/// shuffled indices are dealt round-robin so fold sizes differ by at most one
/// per class. Each fold is returned sorted.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       int k, std::uint64_t seed);

/// Stratified split of `indices` into (train, validation).
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};
Split stratified_split(const std::vector<std::size_t>& indices,
                       const std::vector<int>& labels, double validation_fraction,
                       std::uint64_t seed);

struct CellResult {
  double alpha = 0.0;
  double v = 0.0;
  bool failed = false;
  std::string error;
  double validation_osrsr = 0.0;
};

/// Everything one outer fold did, kept for auditing the protocol.
struct FoldResult {
  int fold = 0;
  std::vector<std::size_t> train, validation, test;
  std::vector<CellResult> cells;
  int selected_cell = -1;
  double alpha = 0.0;
  double v = 0.0;
  int cell_trainings = 0;        // DVAE fits on T
  int retrains = 0;              // DVAE fits on T u V
  int classifier_trainings = 0;
  bool failed = false;
  FoldMetrics metrics;
};

struct CvResult {
  std::vector<FoldResult> folds;
  MetricsReport report;  // over folds that did not fail

  nlohmann::json to_json() const;
};

/// Highest OSRSR on V, then larger alpha, then smaller v. Failed cells are
/// skipped; returns -1 if every cell failed.
int select_cell(const std::vector<CellResult>& cells);

/// `train` supplies epochs, batch size, seed and jobs; alpha and v come from
/// the grid. Normalization is fitted on T u V of each fold; the classifier
/// used to judge reconstructions is trained once per fold on T u V.
CvResult nested_cv(const std::vector<ad::Matrix>& raw, const std::vector<int>& labels,
                   const model::HierarchyPtr& hierarchy, const HyperGrid& grid,
                   const FoldPlan& plan, const training::TrainConfig& train,
                   std::ostream* log = nullptr);

}  // namespace dvae::evaluation
