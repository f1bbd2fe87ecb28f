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

#include "dvae/ad/ops.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dvae::ad {
namespace {

void require_same_shape(Var a, Var b, const char* op) {
  DVAE_REQUIRE(a.rows() == b.rows() && a.cols() == b.cols(),
               std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                   "x" + std::to_string(a.cols()) + " vs " +
                   std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

Var matmul(Var a, Var b) {
  DVAE_REQUIRE(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("matmul", a.value() * b.value(), {a, b},
                  [ia, ib](Tape& t, std::size_t self) {
                    const Matrix& g = t.output_grad(self);
                    if (t.requires_grad(ia))
                      t.accumulate(ia, g * t.value(ib).transpose());
                    if (t.requires_grad(ib))
                      t.accumulate(ib, t.value(ia).transpose() * g);
                  });
}

Var spmm(const SparseMatrix& s, Var x, const SparseMatrix* s_transpose) {
  DVAE_REQUIRE(s.cols() == x.rows(), "spmm: operator columns differ from rows");
  DVAE_REQUIRE(s_transpose == nullptr || (s_transpose->rows() == s.cols() &&
                                          s_transpose->cols() == s.rows()),
               "spmm: transpose has the wrong shape");
  Tape& t = x.tape();
  const std::size_t ix = x.id();
  const SparseMatrix* sp = &s;
  return t.record("spmm", s * x.value(), {x},
                  [sp, s_transpose, ix](Tape& t, std::size_t self) {
                    if (s_transpose) {
                      t.accumulate(ix, *s_transpose * t.output_grad(self));
                    } else {
                      t.accumulate(ix, sp->transpose() * t.output_grad(self));
                    }
                  });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record("add", a.value() + b.value(), {a, b},
                         [ia, ib](Tape& t, std::size_t self) {
                           t.accumulate(ia, t.output_grad(self));
                           t.accumulate(ib, t.output_grad(self));
                         });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record("sub", a.value() - b.value(), {a, b},
                         [ia, ib](Tape& t, std::size_t self) {
                           t.accumulate(ia, t.output_grad(self));
                           t.accumulate(ib, -t.output_grad(self));
                         });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      "mul", a.value().cwiseProduct(b.value()), {a, b},
      [ia, ib](Tape& t, std::size_t self) {
        const Matrix& g = t.output_grad(self);
        t.accumulate(ia, g.cwiseProduct(t.value(ib)));
        t.accumulate(ib, g.cwiseProduct(t.value(ia)));
      });
}

Var scale(Var a, double factor) {
  const std::size_t ia = a.id();
  return a.tape().record("scale", a.value() * factor, {a},
                         [ia, factor](Tape& t, std::size_t self) {
                           t.accumulate(ia, t.output_grad(self) * factor);
                         });
}

Var add_scalar(Var a, double c) {
  const std::size_t ia = a.id();
  return a.tape().record("add_scalar", (a.value().array() + c).matrix(), {a},
                         [ia](Tape& t, std::size_t self) {
                           t.accumulate(ia, t.output_grad(self));
                         });
}

Var exp(Var a) {
  const std::size_t ia = a.id();
  return a.tape().record(
      "exp", a.value().array().exp().matrix(), {a},
      [ia](Tape& t, std::size_t self) {
        t.accumulate(ia, t.output_grad(self).cwiseProduct(t.value(self)));
      });
}

Var log(Var a) {
  const std::size_t ia = a.id();
  return a.tape().record(
      "log", a.value().array().log().matrix(), {a},
      [ia](Tape& t, std::size_t self) {
        t.accumulate(ia, t.output_grad(self).cwiseQuotient(t.value(ia)));
      });
}

Var relu(Var a) {
  const std::size_t ia = a.id();
  return a.tape().record(
      "relu", a.value().cwiseMax(0.0), {a}, [ia](Tape& t, std::size_t self) {
        const Matrix& x = t.value(ia);
        t.accumulate(ia, (x.array() > 0.0)
                             .select(t.output_grad(self).array(), 0.0)
                             .matrix());
      });
}

Var add_bias(Var a, Var bias) {
  DVAE_REQUIRE(bias.rows() == 1 && bias.cols() == a.cols(),
               "add_bias: bias must be 1 x cols");
  const std::size_t ia = a.id(), ib = bias.id();
  Matrix out = a.value();
  out.rowwise() += bias.value().row(0);
  return a.tape().record("add_bias", std::move(out), {a, bias},
                         [ia, ib](Tape& t, std::size_t self) {
                           const Matrix& g = t.output_grad(self);
                           t.accumulate(ia, g);
                           if (t.requires_grad(ib))
                             t.accumulate(ib, g.colwise().sum());
                         });
}

Var reshape(Var a, Index rows, Index cols) {
  DVAE_REQUIRE(rows * cols == a.value().size(),
               "reshape: element count changes");
  const std::size_t ia = a.id();
  const Index r0 = a.rows(), c0 = a.cols();
  Matrix out = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  return a.tape().record(
      "reshape", std::move(out), {a}, [ia, r0, c0](Tape& t, std::size_t self) {
        const Matrix& g = t.output_grad(self);
        t.accumulate(ia, Eigen::Map<const Matrix>(g.data(), r0, c0));
      });
}

Var concat_cols(std::span<const Var> parts) {
  DVAE_REQUIRE(!parts.empty(), "concat_cols: no operands");
  Tape& tape = parts.front().tape();
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const Var& p : parts) {
    DVAE_REQUIRE(p.rows() == rows, "concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<Index> offsets;
  Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    ids.push_back(p.id());
    offsets.push_back(c);
    c += p.cols();
  }
  return tape.record(
      "concat_cols", std::move(out), parts,
      [ids, offsets](Tape& t, std::size_t self) {
        const Matrix& g = t.output_grad(self);
        for (std::size_t k = 0; k < ids.size(); ++k) {
          t.accumulate(ids[k], g.middleCols(offsets[k], t.value(ids[k]).cols()));
        }
      });
}

Var concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

Var slice(Var a, Index row, Index col, Index rows, Index cols) {
  DVAE_REQUIRE(row >= 0 && col >= 0 && row + rows <= a.rows() &&
                   col + cols <= a.cols(),
               "slice: block outside tensor");
  const std::size_t ia = a.id();
  const Index r0 = a.rows(), c0 = a.cols();
  return a.tape().record(
      "slice", a.value().block(row, col, rows, cols), {a},
      [ia, row, col, r0, c0](Tape& t, std::size_t self) {
        const Matrix& g = t.output_grad(self);
        Matrix full = Matrix::Zero(r0, c0);
        full.block(row, col, g.rows(), g.cols()) = g;
        t.accumulate(ia, full);
      });
}

Var softmax(Var a) {
  const std::size_t ia = a.id();
  Matrix s = a.value();
  for (Index r = 0; r < s.rows(); ++r) {
    s.row(r).array() -= s.row(r).maxCoeff();
    s.row(r) = s.row(r).array().exp().matrix();
    s.row(r) /= s.row(r).sum();
  }
  return a.tape().record(
      "softmax", std::move(s), {a}, [ia](Tape& t, std::size_t self) {
        const Matrix& g = t.output_grad(self);
        const Matrix& y = t.value(self);
        Matrix dot = g.cwiseProduct(y).rowwise().sum();
        Matrix ga = y.cwiseProduct(g - dot.replicate(1, g.cols()));
        t.accumulate(ia, ga);
      });
}

Var log_softmax(Var a) {
  const std::size_t ia = a.id();
  Matrix out = a.value();
  for (Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    const double lse = m + std::log((out.row(r).array() - m).exp().sum());
    out.row(r).array() -= lse;
  }
  return a.tape().record(
      "log_softmax", std::move(out), {a}, [ia](Tape& t, std::size_t self) {
        const Matrix& g = t.output_grad(self);
        Matrix p = t.value(self).array().exp().matrix();
        Matrix gsum = g.rowwise().sum();
        t.accumulate(ia, g - p.cwiseProduct(gsum.replicate(1, g.cols())));
      });
}

Var sum(Var a) {
  const std::size_t ia = a.id();
  const Index r = a.rows(), c = a.cols();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape().record("sum", std::move(out), {a},
                         [ia, r, c](Tape& t, std::size_t self) {
                           t.accumulate(ia, Matrix::Constant(
                                                r, c, t.output_grad(self)(0, 0)));
                         });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / n);
}

}  // namespace dvae::ad
