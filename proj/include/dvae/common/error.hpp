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

#include <stdexcept>
#include <string>

namespace dvae {

/// Raised when a caller breaks a documented precondition (shape, range, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a forward or backward pass produces NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Vertex count of a mesh does not match the bound template.
class CorrespondenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DVAE_REQUIRE(cond, msg)                 \
  do {                                          \
    if (!(cond)) throw ::dvae::ContractViolation(msg); \
  } while (0)

}  // namespace dvae
