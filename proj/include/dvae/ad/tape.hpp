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

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

#include "dvae/ad/parameters.hpp"
#include "dvae/common/error.hpp"

namespace dvae::ad {

class Tape;

/// Handle to a tensor recorded on a Tape. Cheap to copy; valid while the
/// owning tape is alive.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  bool requires_grad() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

enum class GradMode { kRecord, kInference };

/// Single-owner record of primitive operations in execution order. Because
/// every operand is recorded before its consumer, reverse iteration is a
/// valid topological order for the backward sweep.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(GradMode mode = GradMode::kRecord) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  GradMode mode() const { return mode_; }
  std::size_t size() const { return nodes_.size(); }

  Var constant(Matrix value);
  /// Differentiable non-parameter leaf (e.g. the input mesh for saliency).
  Var input(Matrix value);
  /// Leaf bound to a parameter. Repeated calls return the same node.
  Var parameter(const ParameterSet& set, ParamId id);

  /// Appends a node. `backward` reads output_grad(self) and calls accumulate()
  /// on its operands. Throws NonFiniteError if `value` is not finite.
  Var record(const char* op, Matrix value, std::span<const Var> inputs,
             BackwardFn backward);
  Var record(const char* op, Matrix value, std::initializer_list<Var> inputs,
             BackwardFn backward) {
    return record(op, std::move(value),
                  std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  /// Reverse sweep from a 1x1 loss. May be called once per tape.
  void backward(Var loss);

  /// Gradient reaching `v` in the last backward(); zeros if none did.
  Matrix grad(Var v) const;
  /// Gradients of every parameter in `set`; zeros for unused parameters.
  Gradients gradients(const ParameterSet& set) const;

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const Matrix& output_grad(std::size_t id) const { return nodes_[id].grad; }

  template <typename Expr>
  void accumulate(std::size_t id, const Expr& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
    if (!all_finite(n.grad)) throw_non_finite_gradient();
  }

 private:
  struct Node {
    const char* op = "";
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    bool requires_grad = false;
    const Parameter* param = nullptr;
  };

  [[noreturn]] void throw_non_finite_gradient() const;

  GradMode mode_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  const char* current_op_ = "";
  bool backward_done_ = false;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }
inline bool Var::requires_grad() const { return tape_->requires_grad(id_); }

/// Free-function form: sweep and collect parameter gradients.
Gradients backward(Tape& tape, Var loss, const ParameterSet& wrt);

}  // namespace dvae::ad
