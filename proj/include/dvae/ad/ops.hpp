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

#include <span>

#include "dvae/ad/tape.hpp"

// Primitive set of the differentiation engine. Every tensor is a dense
// row-major matrix; scalars are 1x1.
namespace dvae::ad {

Var matmul(Var a, Var b);
/// s * x for a constant sparse operator. `s` (and `s_transpose`, an explicit
/// copy of its transpose used by the backward pass) must outlive the tape.
/// Pass &s itself for symmetric operators.
Var spmm(const SparseMatrix& s, Var x, const SparseMatrix* s_transpose = nullptr);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double c);
Var exp(Var a);
Var log(Var a);
Var relu(Var a);
/// Adds a 1 x cols row to every row of `a`.
Var add_bias(Var a, Var bias);

/// Row-major reinterpretation; rows * cols must equal the element count.
Var reshape(Var a, Index rows, Index cols);
Var concat_cols(std::span<const Var> parts);
Var concat_cols(std::initializer_list<Var> parts);
Var slice(Var a, Index row, Index col, Index rows, Index cols);

/// Row-wise softmax.
Var softmax(Var a);
/// Row-wise log-softmax, stable for large logits.
Var log_softmax(Var a);

Var sum(Var a);
Var mean(Var a);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(double c, Var a) { return scale(a, c); }

/// sum of squared entries, 1x1
inline Var sum_squares(Var a) { return sum(mul(a, a)); }

}  // namespace dvae::ad
