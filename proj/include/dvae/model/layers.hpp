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

#include <string>

#include "dvae/ad/ops.hpp"
#include "dvae/common/rng.hpp"

namespace dvae::model {

using ad::Matrix;
using ad::ParamId;
using ad::ParameterSet;
using ad::Tape;
using ad::Var;

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero bias.
Matrix fan_in_uniform(ad::Index rows, ad::Index cols, double fan_in, Rng& rng);

/// y = x W + b, x is rows x in.
class Dense {
 public:
  Dense() = default;
  Dense(ParameterSet& params, const std::string& name, int in, int out, Rng& rng);

  Var operator()(Tape& tape, const ParameterSet& params, Var x) const;

  int in() const { return in_; }
  int out() const { return out_; }

 private:
  ParamId weight_, bias_;
  int in_ = 0, out_ = 0;
};

/// Spectral graph convolution with a Chebyshev filter of `order` terms:
/// y = [T_0(L)x, ..., T_{K-1}(L)x] W + b.
class ChebConv {
 public:
  ChebConv() = default;
  ChebConv(ParameterSet& params, const std::string& name, int in, int out,
           int order, Rng& rng);

  Var operator()(Tape& tape, const ParameterSet& params, Var x,
                 const ad::SparseMatrix& scaled_laplacian) const;

  int in() const { return in_; }
  int out() const { return out_; }
  int order() const { return order_; }

 private:
  ParamId weight_, bias_;
  int in_ = 0, out_ = 0, order_ = 1;
};

}  // namespace dvae::model
