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

#include "dvae/ad/adam.hpp"

#include <cmath>

#include "dvae/common/error.hpp"

namespace dvae::ad {

AdamState::AdamState(const ParameterSet& params, AdamOptions options)
    : options_(options) {
  for (const auto& p : params) {
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

void adam_step(ParameterSet& params, const Gradients& grads, AdamState& state,
               double lr) {
  DVAE_REQUIRE(lr > 0.0, "adam_step: learning rate must be positive");
  DVAE_REQUIRE(params.size() == grads.size() && params.size() == state.m_.size(),
               "adam_step: parameter, gradient and state counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamId id{i};
    DVAE_REQUIRE(params[id].value.rows() == grads[id].rows() &&
                     params[id].value.cols() == grads[id].cols() &&
                     state.m_[i].rows() == grads[id].rows() &&
                     state.m_[i].cols() == grads[id].cols(),
                 "adam_step: shape mismatch for '" + params[id].name + "'");
  }

  const auto& o = state.options_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamId id{i};
    const Matrix& g = grads[id];
    Matrix& m = state.m_[i];
    Matrix& v = state.v_[i];
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
    params[id].value.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + o.epsilon);
  }
}

}  // namespace dvae::ad
