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

#include <functional>
#include <optional>
#include <vector>

#include "dvae/model/models.hpp"

namespace dvae::evaluation {

enum class SaliencyVariant { kProbability, kUnnormalized };

/// Per-vertex importance: the largest absolute input gradient over the
/// vertex's channels.
struct SaliencyMap {
  std::vector<double> values;
  SaliencyVariant variant = SaliencyVariant::kProbability;
  std::optional<int> class_index;
};

/// Anything mapping an input mesh to 1 x 2 pre-softmax scores.
using LogitFn = std::function<ad::Var(ad::Tape&, ad::Var)>;

LogitFn logits_of(const model::Classifier& classifier);

/// |d p(y = cls | x) / dx|, max over channels.
SaliencyMap probability_saliency(const LogitFn& logits, const ad::Matrix& x,
                                 int cls = 0);
/// |d score_cls / dx|, max over channels.
SaliencyMap score_saliency(const LogitFn& logits, const ad::Matrix& x, int cls);

/// Probability variant: one map (class 0; class 1 is identical).
/// Unnormalized variant: one map per class.
std::vector<SaliencyMap> saliency(const model::Classifier& classifier,
                                  const ad::Matrix& x, SaliencyVariant variant);

/// Raw input gradient of the selected output, N x channels.
ad::Matrix probability_gradient(const LogitFn& logits, const ad::Matrix& x, int cls);
ad::Matrix score_gradient(const LogitFn& logits, const ad::Matrix& x, int cls);

}  // namespace dvae::evaluation
