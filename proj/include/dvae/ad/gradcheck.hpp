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

#include <functional>
#include <string>

#include "dvae/ad/tape.hpp"

namespace dvae::ad {

struct GradcheckOptions {
  double step = 1e-5;
  double denominator_floor = 1e-8;
};

struct GradcheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  Index worst_entry = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// Builds a scalar loss on a fresh tape from the current parameter values.
using LossBuilder = std::function<Var(Tape&)>;

/// Compares backward() against central differences for every entry of every
/// parameter in `params`. relative error = |a - n| / max(|a|, |n|, floor).
/// Parameters are restored before returning.
GradcheckReport gradcheck(ParameterSet& params, const LossBuilder& loss,
                          const GradcheckOptions& options = {});

/// Same comparison for a differentiable input leaf instead of parameters.
using InputLossBuilder = std::function<Var(Tape&, Var input)>;
GradcheckReport gradcheck_input(const Matrix& point,
                                const InputLossBuilder& loss,
                                const GradcheckOptions& options = {});

}  // namespace dvae::ad
