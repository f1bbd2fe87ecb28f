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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvae/evaluation/cv.hpp"
#include "dvae/evaluation/missing.hpp"
#include "dvae/synthetic/generator.hpp"
#include "dvae/training/trainer.hpp"

namespace dvae::app {

/// Training knobs as they appear in a config file.
struct TrainSection {
  double alpha = 2.0;
  double v = 1.0;
  int latent = model::kDefaultLatent;
  int batch_size = 16;
  int epochs = 600;
  int checkpoint_every = 100;
  bool augment = false;
  double keep_probability = 0.6;
  double max_fraction = 0.4;
};

/// Everything a command may need. Each field maps to a dotted key such as
/// "train.epochs" that can be overridden with --set.
struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  synthetic::PopulationSpec population;
  TrainSection train;
  std::vector<int> hierarchy_factors{4, 4, 4, 4};
  evaluation::FoldPlan folds;
  evaluation::HyperGrid grid;
  /// Fold held out from `train` commands; -1 trains on every subject.
  int holdout_fold = 0;
  std::vector<double> missing_fractions = evaluation::default_fractions();

  nlohmann::json to_json() const;
  /// Overlays `j` onto `base`. Unknown keys throw ContractViolation naming
  /// the offending key.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);

  training::TrainConfig train_config() const;
};

/// Reads a JSON config file on top of the defaults.
RunConfig load_config(const std::filesystem::path& path);

/// Applies "dotted.key=value" overrides; values are parsed as JSON, falling
/// back to a plain string.
void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments);

}  // namespace dvae::app
