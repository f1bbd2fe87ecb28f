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
#include <vector>

#include "dvae/ad/parameters.hpp"

namespace dvae::ad {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter first and second moment estimates.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const ParameterSet& params, AdamOptions options = {});

  const AdamOptions& options() const { return options_; }
  std::int64_t step() const { return step_; }
  const Matrix& first_moment(ParamId id) const { return m_.at(id.index); }
  const Matrix& second_moment(ParamId id) const { return v_.at(id.index); }

 private:
  friend void adam_step(ParameterSet&, const Gradients&, AdamState&, double);

  AdamOptions options_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t step_ = 0;
};

/// Bias-corrected Adam update, in place.
void adam_step(ParameterSet& params, const Gradients& grads, AdamState& state,
               double lr);

}  // namespace dvae::ad
