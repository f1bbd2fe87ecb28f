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

#include "dvae/model/networks.hpp"

#include "dvae/common/error.hpp"

namespace dvae::model {

MeshEncoder::MeshEncoder(ParameterSet& params, const std::string& prefix,
                         const Architecture& arch, Rng& rng) {
  int in = arch.input_channels;
  for (std::size_t l = 0; l < arch.levels(); ++l) {
    const int out = arch.encoder_channels[l];
    convs_.emplace_back(params, prefix + ".conv" + std::to_string(l), in, out,
                        arch.chebyshev_order, rng);
    in = out;
  }
}

Var MeshEncoder::operator()(Tape& tape, const ParameterSet& params,
                            const mesh::SamplingHierarchy& h, Var x) const {
  DVAE_REQUIRE(h.levels() == convs_.size(),
               "MeshEncoder: hierarchy depth does not match the architecture");
  Var cur = x;
  for (std::size_t l = 0; l < convs_.size(); ++l) {
    cur = ad::relu(convs_[l](tape, params, cur, h.laplacians[l]));
    cur = ad::spmm(h.down[l], cur);
  }
  return ad::reshape(cur, 1, cur.rows() * cur.cols());
}

MeshDecoder::MeshDecoder(ParameterSet& params, const std::string& prefix,
                         int code_size, const Architecture& arch, Rng& rng) {
  const std::size_t levels = arch.levels();
  DVAE_REQUIRE(arch.decoder_channels.size() == levels,
               "MeshDecoder: one decoder channel entry per level required");
  coarse_vertices_ = static_cast<ad::Index>(arch.vertex_counts.back());
  coarse_channels_ = arch.decoder_channels.front();
  fc_ = Dense(params, prefix + ".fc", code_size,
              static_cast<int>(coarse_vertices_) * coarse_channels_, rng);
  for (std::size_t i = 0; i < levels; ++i) {
    const int in = arch.decoder_channels[i];
    const int out =
        i + 1 < levels ? arch.decoder_channels[i + 1] : arch.output_channels;
    convs_.emplace_back(params, prefix + ".conv" + std::to_string(i), in, out,
                        arch.chebyshev_order, rng);
  }
}

Var MeshDecoder::operator()(Tape& tape, const ParameterSet& params,
                            const mesh::SamplingHierarchy& h, Var code) const {
  DVAE_REQUIRE(h.levels() == convs_.size(),
               "MeshDecoder: hierarchy depth does not match the architecture");
  Var cur = ad::reshape(fc_(tape, params, code), coarse_vertices_, coarse_channels_);
  const std::size_t levels = convs_.size();
  for (std::size_t i = 0; i < levels; ++i) {
    const std::size_t level = levels - 1 - i;  // hierarchy index being restored
    cur = ad::spmm(h.up[level], cur);
    cur = convs_[i](tape, params, cur, h.laplacians[level]);
    if (i + 1 < levels) cur = ad::relu(cur);
  }
  return cur;
}

}  // namespace dvae::model
