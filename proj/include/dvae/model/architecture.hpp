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
#include <string>
#include <vector>

namespace dvae::model {

enum class ModelKind : std::uint8_t { kDvae = 1, kVae = 2, kClassifier = 3 };

std::string to_string(ModelKind kind);

/// Shape of a mesh network. One encoder/decoder convolution per hierarchy
/// level; `vertex_counts` pins the hierarchy a checkpoint was trained on.
struct Architecture {
  ModelKind kind = ModelKind::kDvae;
  int input_channels = 3;                           // 6 for C_recon
  std::vector<int> encoder_channels{16, 16, 16, 32};
  std::vector<int> decoder_channels{32, 16, 16, 16};
  int output_channels = 3;
  int chebyshev_order = 6;
  int latent = 16;
  int classes = 2;
  std::vector<std::size_t> vertex_counts;

  std::size_t levels() const { return encoder_channels.size(); }
  std::size_t flat_features() const {
    return vertex_counts.back() * static_cast<std::size_t>(encoder_channels.back());
  }

  bool operator==(const Architecture&) const = default;
};

inline constexpr int kDefaultLatent = 16;
inline constexpr int kClassCount = 2;

}  // namespace dvae::model
