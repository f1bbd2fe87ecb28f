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

#include <memory>
#include <string>
#include <vector>

#include "dvae/mesh/hierarchy.hpp"
#include "dvae/model/architecture.hpp"
#include "dvae/model/layers.hpp"

namespace dvae::model {

using HierarchyPtr = std::shared_ptr<const mesh::SamplingHierarchy>;

/// conv -> ReLU -> downsample at every level, then flatten to 1 x F.
class MeshEncoder {
 public:
  MeshEncoder() = default;
  MeshEncoder(ParameterSet& params, const std::string& prefix,
              const Architecture& arch, Rng& rng);

  Var operator()(Tape& tape, const ParameterSet& params,
                 const mesh::SamplingHierarchy& h, Var x) const;

 private:
  std::vector<ChebConv> convs_;
};

/// dense -> reshape to the coarsest level, then upsample -> conv (ReLU on all
/// but the last) back to the template resolution.
class MeshDecoder {
 public:
  MeshDecoder() = default;
  MeshDecoder(ParameterSet& params, const std::string& prefix, int code_size,
              const Architecture& arch, Rng& rng);

  Var operator()(Tape& tape, const ParameterSet& params,
                 const mesh::SamplingHierarchy& h, Var code) const;

 private:
  Dense fc_;
  std::vector<ChebConv> convs_;
  ad::Index coarse_vertices_ = 0;
  int coarse_channels_ = 0;
};

}  // namespace dvae::model
