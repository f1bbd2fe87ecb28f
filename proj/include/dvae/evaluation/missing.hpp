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
#include <string>
#include <vector>

#include <json.hpp>

#include "dvae/mesh/normalization.hpp"
#include "dvae/model/models.hpp"
#include "dvae/training/augment.hpp"
#include "dvae/training/dataset.hpp"

namespace dvae::evaluation {

enum class Method { kC, kDvae, kVaeC, kDvaeCRecon };
inline constexpr std::array<Method, 4> kAllMethods{Method::kC, Method::kDvae,
                                                   Method::kVaeC, Method::kDvaeCRecon};
std::string to_string(Method m);

/// Trained models compared under missing data. VAE+C classifies the VAE
/// reconstruction with `c`; DVAE uses q0 directly.
struct BenchModels {
  const model::Classifier* c = nullptr;
  const model::DvaeModel* dvae = nullptr;
  const model::VaeModel* vae = nullptr;
  const model::Classifier* c_recon = nullptr;
  /// Classifier applied to VAE reconstructions. Those have no missing data,
  /// so this one is normally trained without augmentation. Defaults to `c`.
  const model::Classifier* vae_c = nullptr;
};

struct BenchCell {
  double fraction = 0.0;
  training::Side side = training::Side::kLower;
  std::array<double, 4> accuracy{};  // indexed like kAllMethods, in [0, 1]
};

struct BenchResult {
  std::vector<double> fractions;
  std::vector<BenchCell> cells;
  /// accuracy averaged over sides, [fraction][method]
  std::vector<std::array<double, 4>> mean_accuracy;

  nlohmann::json to_json() const;
  /// Plain-text table, one row per fraction.
  std::string table() const;
};

/// Default sweep 0, 0.1, ..., 0.7.
std::vector<double> default_fractions();

/// Masks every test mesh on every side at every fraction and classifies it
/// with each method.
BenchResult missing_benchmark(const BenchModels& models,
                              const training::LabeledSet& test,
                              const mesh::NormalizationStats& stats,
                              const std::vector<double>& fractions,
                              std::size_t jobs = 1);

}  // namespace dvae::evaluation
