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
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvae/ad/adam.hpp"
#include "dvae/model/models.hpp"
#include "dvae/training/augment.hpp"
#include "dvae/training/dataset.hpp"
#include "dvae/training/loss.hpp"

namespace dvae::training {

/// 6e-4 through epoch 200, 3e-4 through 400, then 1e-4. Epochs are 1-based.
double learning_rate(int epoch);

struct TrainConfig {
  double alpha = 2.0;
  double v = 1.0;
  int latent = model::kDefaultLatent;
  int batch_size = 16;
  int epochs = 600;
  std::uint64_t seed = 1;
  std::optional<MissingDataPolicy> augmentation;
  /// Required when augmentation is set: band geometry is measured in raw space.
  const mesh::NormalizationStats* stats = nullptr;
  std::size_t jobs = 1;
  int checkpoint_every = 100;
  ad::AdamOptions adam;
  /// Lower bound on the per-batch variance estimate of the VAE.
  double min_v = 1e-6;
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;  // mean over the epoch's samples
  double lr = 0.0;
  double v = 0.0;      // likelihood variance used (mean over batches for the VAE)
};

using History = std::vector<EpochRecord>;

struct TrainHooks {
  /// Receives "epoch,kl,recon,class,total,lr" lines, header first.
  std::ostream* log = nullptr;
  /// Called every checkpoint_every epochs and after the final epoch.
  std::function<void(int epoch)> checkpoint;
  std::function<void(const EpochRecord&)> on_epoch;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, const std::string& detail);
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

History train_dvae(model::DvaeModel& model, const LabeledSet& data,
                   const TrainConfig& config, const TrainHooks& hooks = {});

/// v is re-estimated for every batch as the mean squared reconstruction error
/// per coordinate; config.v is ignored.
History train_vae(model::VaeModel& model, const LabeledSet& data,
                  const TrainConfig& config, const TrainHooks& hooks = {});

/// Maps a (possibly masked) normalized mesh to the classifier input.
using InputTransform = std::function<Matrix(const Matrix&)>;

/// Cross-entropy training. Without a transform the mesh itself is the input.
History train_classifier(model::Classifier& model, const LabeledSet& data,
                         const TrainConfig& config, const TrainHooks& hooks = {},
                         const InputTransform& transform = {});

/// Per-vertex [x - xhat_0 || x - xhat_1], where xhat_c decodes the shared
/// code z = mu(x, q0 estimate) with label c.
Matrix recon_difference_input(const model::DvaeModel& dvae, const Matrix& x);
/// Assembles the 6-channel input from given reconstructions.
Matrix recon_difference_input(const Matrix& x, const Matrix& xhat0,
                              const Matrix& xhat1);

}  // namespace dvae::training
