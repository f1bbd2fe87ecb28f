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

#include "dvae/training/dataset.hpp"

#include "dvae/common/error.hpp"

namespace dvae::training {

LabeledSet subset(const LabeledSet& set, const std::vector<std::size_t>& indices) {
  LabeledSet out;
  out.x.reserve(indices.size());
  out.y.reserve(indices.size());
  for (auto i : indices) {
    DVAE_REQUIRE(i < set.size(), "subset: index out of range");
    out.push_back(set.x[i], set.y[i]);
  }
  return out;
}

LabeledSet normalize(const std::vector<Matrix>& raw, const std::vector<int>& labels,
                     const mesh::NormalizationStats& stats) {
  DVAE_REQUIRE(raw.size() == labels.size(), "normalize: label count mismatch");
  LabeledSet out;
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back(stats.apply(raw[i]), labels[i]);
  return out;
}

}  // namespace dvae::training
