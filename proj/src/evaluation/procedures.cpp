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

#include "dvae/evaluation/procedures.hpp"

namespace dvae::evaluation {

Reconstructions reconstruct(const model::DvaeModel& dvae, const Matrix& x, int label) {
  Reconstructions r;
  r.label = label;
  r.z = dvae.encode_latent(x, model::one_hot(label)).mu;
  r.same = dvae.decode(r.z, model::one_hot(label));
  r.opposite = dvae.decode(r.z, model::one_hot(1 - label));
  return r;
}

Matrix sex_change(const model::DvaeModel& dvae, const Matrix& x, int label) {
  const Matrix z = dvae.encode_latent(x, model::one_hot(label)).mu;
  return dvae.decode(z, model::one_hot(1 - label));
}

Matrix sex_preserve(const model::DvaeModel& dvae, const Matrix& x, int label) {
  const Matrix z = dvae.encode_latent(x, model::one_hot(label)).mu;
  return dvae.decode(z, model::one_hot(label));
}

int estimate_label(const model::DvaeModel& dvae, const Matrix& x) {
  return model::argmax_label(dvae.encode_label(x));
}

}  // namespace dvae::evaluation
