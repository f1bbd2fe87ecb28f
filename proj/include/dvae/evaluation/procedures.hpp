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

#include "dvae/model/models.hpp"

namespace dvae::evaluation {

using ad::Matrix;

/// Both class-conditional reconstructions of one mesh from a shared code
/// z = mu(x, label).
struct Reconstructions {
  int label = 0;
  Matrix z;
  Matrix same;      // decode(z, label)
  Matrix opposite;  // decode(z, 1 - label)
};

Reconstructions reconstruct(const model::DvaeModel& dvae, const Matrix& x, int label);

/// Opposite-class reconstruction with z = mu.
Matrix sex_change(const model::DvaeModel& dvae, const Matrix& x, int label);
/// Same-class reconstruction with z = mu.
Matrix sex_preserve(const model::DvaeModel& dvae, const Matrix& x, int label);

/// argmax of q0; used in place of the label when it is unknown.
int estimate_label(const model::DvaeModel& dvae, const Matrix& x);

}  // namespace dvae::evaluation
