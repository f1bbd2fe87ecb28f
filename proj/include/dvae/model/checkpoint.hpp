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

#include <filesystem>

#include <json.hpp>

#include "dvae/model/models.hpp"

namespace dvae::model {

/// Binary layout: "DVAECKPT", version byte, architecture descriptor, then
/// every parameter in declaration order as (name, rows, cols, f32 values).
/// All integers and floats are little-endian.
inline constexpr unsigned char kCheckpointFormatVersion = 1;

/// Writes the checkpoint and, next to it, `metadata` as a JSON sidecar.
void save_checkpoint(const std::filesystem::path& path, const MeshModel& model,
                     const nlohmann::json& metadata = nlohmann::json::object());

/// The sidecar lives at the checkpoint path with a ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

/// Throws FormatError on a bad magic or a version mismatch; the message names
/// both the file's version and the supported one.
Architecture read_checkpoint_architecture(const std::filesystem::path& path);

/// Overwrites the parameters of `model`. The stored architecture, parameter
/// names and shapes must match exactly.
void load_parameters(const std::filesystem::path& path, MeshModel& model);

nlohmann::json read_sidecar(const std::filesystem::path& checkpoint);

template <typename Model>
Model load_model(const std::filesystem::path& path, HierarchyPtr hierarchy) {
  Model model(read_checkpoint_architecture(path), std::move(hierarchy), 0);
  load_parameters(path, model);
  return model;
}

}  // namespace dvae::model
