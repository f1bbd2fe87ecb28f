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

#include "dvae/model/layers.hpp"

#include <cmath>
#include <vector>

namespace dvae::model {

Matrix fan_in_uniform(ad::Index rows, ad::Index cols, double fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (ad::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Dense::Dense(ParameterSet& params, const std::string& name, int in, int out,
             Rng& rng)
    : in_(in), out_(out) {
  weight_ = params.add(name + ".weight", fan_in_uniform(in, out, in, rng));
  bias_ = params.add(name + ".bias", Matrix::Zero(1, out));
}

Var Dense::operator()(Tape& tape, const ParameterSet& params, Var x) const {
  return ad::add_bias(ad::matmul(x, tape.parameter(params, weight_)),
                      tape.parameter(params, bias_));
}

ChebConv::ChebConv(ParameterSet& params, const std::string& name, int in,
                   int out, int order, Rng& rng)
    : in_(in), out_(out), order_(order) {
  weight_ = params.add(name + ".weight",
                       fan_in_uniform(order * in, out, order * in, rng));
  bias_ = params.add(name + ".bias", Matrix::Zero(1, out));
}

Var ChebConv::operator()(Tape& tape, const ParameterSet& params, Var x,
                         const ad::SparseMatrix& lap) const {
  DVAE_REQUIRE(x.cols() == in_, "ChebConv: input channel count mismatch");
  std::vector<Var> terms;
  terms.reserve(order_);
  terms.push_back(x);
  if (order_ > 1) terms.push_back(ad::spmm(lap, x, &lap));
  for (int k = 2; k < order_; ++k) {
    terms.push_back(
        ad::sub(ad::scale(ad::spmm(lap, terms[k - 1], &lap), 2.0), terms[k - 2]));
  }
  Var stacked = ad::concat_cols(terms);
  return ad::add_bias(ad::matmul(stacked, tape.parameter(params, weight_)),
                      tape.parameter(params, bias_));
}

}  // namespace dvae::model
