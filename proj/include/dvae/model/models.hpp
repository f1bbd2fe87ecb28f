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

#include "dvae/model/networks.hpp"

namespace dvae::model {

/// 1 x classes one-hot row.
Matrix one_hot(int label, int classes = kClassCount);
/// Inverse of one_hot; throws ContractViolation for anything else.
int label_of(const Matrix& y);
/// argmax over a 1 x classes probability row; ties resolve to the lower index.
int argmax_label(const Matrix& probabilities);

/// State shared by every mesh network: architecture, hierarchy, parameters.
class MeshModel {
 public:
  const Architecture& architecture() const { return arch_; }
  const mesh::SamplingHierarchy& hierarchy() const { return *hierarchy_; }
  const HierarchyPtr& hierarchy_ptr() const { return hierarchy_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }
  ad::Index vertex_count() const {
    return static_cast<ad::Index>(arch_.vertex_counts.front());
  }

 protected:
  MeshModel(Architecture arch, HierarchyPtr hierarchy);
  void require_input(const Matrix& x, int channels) const;

  Architecture arch_;
  HierarchyPtr hierarchy_;
  ParameterSet params_;
};

struct LatentVars {
  Var mu;
  Var logvar;
};

/// Posterior moments for one mesh, each 1 x L.
struct LatentCode {
  Matrix mu;
  Matrix logvar;
};

/// Disentangled VAE: q0 (label head), q1/q2 (latent heads conditioned on the
/// one-hot label) over a shared convolutional trunk, and a decoder f(z, y).
class DvaeModel : public MeshModel {
 public:
  DvaeModel(Architecture arch, HierarchyPtr hierarchy, std::uint64_t seed);

  Var features(Tape& tape, Var x) const;
  Var label_logits(Tape& tape, Var features) const;
  LatentVars latent(Tape& tape, Var features, Var y) const;
  Var decode(Tape& tape, Var z, Var y) const;

  /// P_y = softmax(q0(x)), 1 x 2.
  Matrix encode_label(const Matrix& x) const;
  LatentCode encode_latent(const Matrix& x, const Matrix& y) const;
  Matrix decode(const Matrix& z, const Matrix& y) const;

 private:
  MeshEncoder encoder_;
  Dense q0_, q1_, q2_;
  MeshDecoder decoder_;
};

/// Plain VAE with the label pathway removed.
class VaeModel : public MeshModel {
 public:
  VaeModel(Architecture arch, HierarchyPtr hierarchy, std::uint64_t seed);

  Var features(Tape& tape, Var x) const;
  LatentVars latent(Tape& tape, Var features) const;
  Var decode(Tape& tape, Var z) const;

  LatentCode encode_latent(const Matrix& x) const;
  Matrix decode(const Matrix& z) const;
  /// decode(mu(x)).
  Matrix reconstruct(const Matrix& x) const;

 private:
  MeshEncoder encoder_;
  Dense q1_, q2_;
  MeshDecoder decoder_;
};

/// Encoder trunk plus label head. input_channels is 3 for C and 6 for C_recon.
class Classifier : public MeshModel {
 public:
  Classifier(Architecture arch, HierarchyPtr hierarchy, std::uint64_t seed);

  Var logits(Tape& tape, Var input) const;
  Matrix probabilities(const Matrix& input) const;
  int predict(const Matrix& input) const { return argmax_label(probabilities(input)); }

 private:
  MeshEncoder encoder_;
  Dense head_;
};

Architecture dvae_architecture(const mesh::SamplingHierarchy& h,
                               int latent = kDefaultLatent);
/// Latent size defaults to L + 2 so the VAE code is as large as (z, y).
Architecture vae_architecture(const mesh::SamplingHierarchy& h,
                              int latent = kDefaultLatent + 2);
Architecture classifier_architecture(const mesh::SamplingHierarchy& h,
                                     int input_channels = 3);

}  // namespace dvae::model
