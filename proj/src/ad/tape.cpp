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

#include "dvae/ad/tape.hpp"

#include <string>

namespace dvae::ad {

Var Tape::constant(Matrix value) {
  return record("constant", std::move(value), {}, nullptr);
}

Var Tape::input(Matrix value) {
  Var v = record("input", std::move(value), {}, nullptr);
  nodes_[v.id()].requires_grad = mode_ == GradMode::kRecord;
  return v;
}

Var Tape::parameter(const ParameterSet& set, ParamId id) {
  const Parameter* p = &set[id];
  if (auto it = param_nodes_.find(p); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  Var v = record("parameter", p->value, {}, nullptr);
  nodes_[v.id()].requires_grad = mode_ == GradMode::kRecord;
  nodes_[v.id()].param = p;
  param_nodes_.emplace(p, v.id());
  return v;
}

Var Tape::record(const char* op, Matrix value, std::span<const Var> inputs,
                 BackwardFn backward) {
  for (const Var& in : inputs) {
    DVAE_REQUIRE(in.valid() && &in.tape() == this,
                 std::string("operand of '") + op + "' belongs to another tape");
  }
  if (!all_finite(value)) {
    throw NonFiniteError(std::string("non-finite value produced by '") + op +
                         "'");
  }
  bool needs_grad = false;
  if (mode_ == GradMode::kRecord) {
    for (const Var& in : inputs) needs_grad = needs_grad || requires_grad(in.id());
  }
  Node node;
  node.op = op;
  node.value = std::move(value);
  node.requires_grad = needs_grad;
  if (needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var loss) {
  DVAE_REQUIRE(loss.valid() && &loss.tape() == this,
               "backward: loss belongs to another tape");
  const Matrix& lv = value(loss.id());
  DVAE_REQUIRE(lv.rows() == 1 && lv.cols() == 1,
               "backward: loss must be a scalar, got " +
                   std::to_string(lv.rows()) + "x" + std::to_string(lv.cols()));
  DVAE_REQUIRE(!backward_done_, "backward: tape already differentiated");
  backward_done_ = true;
  if (!nodes_[loss.id()].requires_grad) return;

  nodes_[loss.id()].grad = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.size() == 0) continue;
    current_op_ = n.op;
    n.backward(*this, i);
  }
  current_op_ = "";
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Gradients Tape::gradients(const ParameterSet& set) const {
  Gradients out(set);
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto it = param_nodes_.find(&set[ParamId{i}]);
    if (it == param_nodes_.end()) continue;
    const Node& n = nodes_[it->second];
    if (n.grad.size() != 0) out[ParamId{i}] = n.grad;
  }
  return out;
}

void Tape::throw_non_finite_gradient() const {
  throw NonFiniteError(std::string("non-finite gradient in backward of '") +
                       current_op_ + "'");
}

Gradients backward(Tape& tape, Var loss, const ParameterSet& wrt) {
  tape.backward(loss);
  return tape.gradients(wrt);
}

}  // namespace dvae::ad
