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

#include "dvae/ad/parameters.hpp"

#include <algorithm>

#include "dvae/common/error.hpp"

namespace dvae::ad {

ParamId ParameterSet::add(std::string name, Matrix init) {
  params_.push_back({std::move(name), std::move(init)});
  return ParamId{params_.size() - 1};
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

Gradients::Gradients(const ParameterSet& like) {
  grads_.reserve(like.size());
  for (const auto& p : like) {
    grads_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

Gradients& Gradients::operator+=(const Gradients& other) {
  DVAE_REQUIRE(other.grads_.size() == grads_.size(),
               "Gradients::operator+=: parameter count mismatch");
  for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_[i];
  return *this;
}

Gradients& Gradients::operator*=(double factor) {
  for (auto& g : grads_) g *= factor;
  return *this;
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& g : grads_) {
    if (g.size() > 0) m = std::max(m, g.cwiseAbs().maxCoeff());
  }
  return m;
}

bool Gradients::all_finite() const {
  return std::all_of(grads_.begin(), grads_.end(),
                     [](const Matrix& g) { return ad::all_finite(g); });
}

}  // namespace dvae::ad
