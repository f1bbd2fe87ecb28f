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

#include "dvae/model/models.hpp"

#include <string>

#include "dvae/common/error.hpp"

namespace dvae::model {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDvae: return "dvae";
    case ModelKind::kVae: return "vae";
    case ModelKind::kClassifier: return "classifier";
  }
  return "unknown";
}

Matrix one_hot(int label, int classes) {
  DVAE_REQUIRE(label >= 0 && label < classes, "one_hot: label out of range");
  Matrix y = Matrix::Zero(1, classes);
  y(0, label) = 1.0;
  return y;
}

int label_of(const Matrix& y) {
  DVAE_REQUIRE(y.rows() == 1 && y.cols() == kClassCount,
               "label must be a 1 x 2 one-hot row");
  int found = -1;
  for (int c = 0; c < kClassCount; ++c) {
    const double v = y(0, c);
    if (v == 1.0) {
      DVAE_REQUIRE(found < 0, "label must be one-hot");
      found = c;
    } else {
      DVAE_REQUIRE(v == 0.0, "label must be one-hot");
    }
  }
  DVAE_REQUIRE(found >= 0, "label must be one-hot");
  return found;
}

int argmax_label(const Matrix& p) {
  DVAE_REQUIRE(p.rows() == 1 && p.cols() >= 1, "argmax_label: expects a row");
  int best = 0;
  for (int c = 1; c < p.cols(); ++c) {
    if (p(0, c) > p(0, best)) best = c;
  }
  return best;
}

MeshModel::MeshModel(Architecture arch, HierarchyPtr hierarchy)
    : arch_(std::move(arch)), hierarchy_(std::move(hierarchy)) {
  DVAE_REQUIRE(hierarchy_ != nullptr, "model requires a sampling hierarchy");
  DVAE_REQUIRE(arch_.levels() == hierarchy_->levels(),
               "architecture depth does not match the hierarchy");
  DVAE_REQUIRE(arch_.decoder_channels.size() == arch_.levels(),
               "encoder and decoder depths differ");
  DVAE_REQUIRE(arch_.classes == kClassCount, "only two classes are supported");
  DVAE_REQUIRE(arch_.chebyshev_order >= 1, "Chebyshev order must be >= 1");
  if (arch_.vertex_counts.empty()) arch_.vertex_counts = hierarchy_->vertex_counts;
  DVAE_REQUIRE(arch_.vertex_counts == hierarchy_->vertex_counts,
               "architecture vertex counts do not match the hierarchy");
}

void MeshModel::require_input(const Matrix& x, int channels) const {
  DVAE_REQUIRE(x.rows() == vertex_count() && x.cols() == channels,
               "input shape does not match the template (expected " +
                   std::to_string(vertex_count()) + " x " +
                   std::to_string(channels) + ", got " +
                   std::to_string(x.rows()) + " x " + std::to_string(x.cols()) +
                   ")");
}

DvaeModel::DvaeModel(Architecture arch, HierarchyPtr hierarchy,
                     std::uint64_t seed)
    : MeshModel(std::move(arch), std::move(hierarchy)) {
  arch_.kind = ModelKind::kDvae;
  Rng rng = substream(seed, {stream::kInit});
  const int flat = static_cast<int>(arch_.flat_features());
  encoder_ = MeshEncoder(params_, "encoder", arch_, rng);
  q0_ = Dense(params_, "q0", flat, arch_.classes, rng);
  q1_ = Dense(params_, "q1", flat + arch_.classes, arch_.latent, rng);
  q2_ = Dense(params_, "q2", flat + arch_.classes, arch_.latent, rng);
  decoder_ = MeshDecoder(params_, "decoder", arch_.latent + arch_.classes, arch_, rng);
}

Var DvaeModel::features(Tape& tape, Var x) const {
  return encoder_(tape, params_, *hierarchy_, x);
}

Var DvaeModel::label_logits(Tape& tape, Var features) const {
  return q0_(tape, params_, features);
}

LatentVars DvaeModel::latent(Tape& tape, Var features, Var y) const {
  Var fy = ad::concat_cols({features, y});
  return {q1_(tape, params_, fy), q2_(tape, params_, fy)};
}

Var DvaeModel::decode(Tape& tape, Var z, Var y) const {
  return decoder_(tape, params_, *hierarchy_, ad::concat_cols({z, y}));
}

Matrix DvaeModel::encode_label(const Matrix& x) const {
  require_input(x, arch_.input_channels);
  Tape tape(ad::GradMode::kInference);
  Var logits = label_logits(tape, features(tape, tape.constant(x)));
  return ad::softmax(logits).value();
}

LatentCode DvaeModel::encode_latent(const Matrix& x, const Matrix& y) const {
  require_input(x, arch_.input_channels);
  label_of(y);
  Tape tape(ad::GradMode::kInference);
  LatentVars lv = latent(tape, features(tape, tape.constant(x)), tape.constant(y));
  return {lv.mu.value(), lv.logvar.value()};
}

Matrix DvaeModel::decode(const Matrix& z, const Matrix& y) const {
  DVAE_REQUIRE(z.rows() == 1 && z.cols() == arch_.latent,
               "decode: z must be 1 x L");
  label_of(y);
  Tape tape(ad::GradMode::kInference);
  return decode(tape, tape.constant(z), tape.constant(y)).value();
}

VaeModel::VaeModel(Architecture arch, HierarchyPtr hierarchy, std::uint64_t seed)
    : MeshModel(std::move(arch), std::move(hierarchy)) {
  arch_.kind = ModelKind::kVae;
  Rng rng = substream(seed, {stream::kInit});
  const int flat = static_cast<int>(arch_.flat_features());
  encoder_ = MeshEncoder(params_, "encoder", arch_, rng);
  q1_ = Dense(params_, "q1", flat, arch_.latent, rng);
  q2_ = Dense(params_, "q2", flat, arch_.latent, rng);
  decoder_ = MeshDecoder(params_, "decoder", arch_.latent, arch_, rng);
}

Var VaeModel::features(Tape& tape, Var x) const {
  return encoder_(tape, params_, *hierarchy_, x);
}

LatentVars VaeModel::latent(Tape& tape, Var features) const {
  return {q1_(tape, params_, features), q2_(tape, params_, features)};
}

Var VaeModel::decode(Tape& tape, Var z) const {
  return decoder_(tape, params_, *hierarchy_, z);
}

LatentCode VaeModel::encode_latent(const Matrix& x) const {
  require_input(x, arch_.input_channels);
  Tape tape(ad::GradMode::kInference);
  LatentVars lv = latent(tape, features(tape, tape.constant(x)));
  return {lv.mu.value(), lv.logvar.value()};
}

Matrix VaeModel::decode(const Matrix& z) const {
  DVAE_REQUIRE(z.rows() == 1 && z.cols() == arch_.latent,
               "decode: z must be 1 x L");
  Tape tape(ad::GradMode::kInference);
  return decode(tape, tape.constant(z)).value();
}

Matrix VaeModel::reconstruct(const Matrix& x) const {
  return decode(encode_latent(x).mu);
}

Classifier::Classifier(Architecture arch, HierarchyPtr hierarchy,
                       std::uint64_t seed)
    : MeshModel(std::move(arch), std::move(hierarchy)) {
  arch_.kind = ModelKind::kClassifier;
  Rng rng = substream(seed, {stream::kInit});
  encoder_ = MeshEncoder(params_, "encoder", arch_, rng);
  head_ = Dense(params_, "head", static_cast<int>(arch_.flat_features()),
                arch_.classes, rng);
}

Var Classifier::logits(Tape& tape, Var input) const {
  return head_(tape, params_, encoder_(tape, params_, *hierarchy_, input));
}

Matrix Classifier::probabilities(const Matrix& input) const {
  require_input(input, arch_.input_channels);
  Tape tape(ad::GradMode::kInference);
  return ad::softmax(logits(tape, tape.constant(input))).value();
}

namespace {

Architecture base_architecture(const mesh::SamplingHierarchy& h) {
  Architecture a;
  a.vertex_counts = h.vertex_counts;
  const std::size_t n = h.levels();
  DVAE_REQUIRE(n >= 1, "hierarchy must have at least one level");
  // 16 channels throughout, 32 at the bottleneck; n = 4 gives the defaults.
  a.encoder_channels.assign(n, 16);
  a.encoder_channels.back() = 32;
  a.decoder_channels.assign(n, 16);
  a.decoder_channels.front() = 32;
  return a;
}

}  // namespace

Architecture dvae_architecture(const mesh::SamplingHierarchy& h, int latent) {
  Architecture a = base_architecture(h);
  a.kind = ModelKind::kDvae;
  a.latent = latent;
  return a;
}

Architecture vae_architecture(const mesh::SamplingHierarchy& h, int latent) {
  Architecture a = base_architecture(h);
  a.kind = ModelKind::kVae;
  a.latent = latent;
  return a;
}

Architecture classifier_architecture(const mesh::SamplingHierarchy& h,
                                     int input_channels) {
  Architecture a = base_architecture(h);
  a.kind = ModelKind::kClassifier;
  a.input_channels = input_channels;
  return a;
}

}  // namespace dvae::model
