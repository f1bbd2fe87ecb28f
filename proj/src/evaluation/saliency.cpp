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

#include "dvae/evaluation/saliency.hpp"

#include "dvae/common/error.hpp"

namespace dvae::evaluation {

namespace {

using ad::Matrix;

Matrix input_gradient(const LogitFn& logits, const Matrix& x, int cls, bool softmax) {
  DVAE_REQUIRE(cls >= 0 && cls < model::kClassCount, "saliency: class out of range");
  ad::Tape tape;
  ad::Var in = tape.input(x);
  ad::Var scores = logits(tape, in);
  DVAE_REQUIRE(scores.rows() == 1 && scores.cols() == model::kClassCount,
               "saliency: logits must be 1 x 2");
  if (softmax) scores = ad::softmax(scores);
  tape.backward(ad::slice(scores, 0, cls, 1, 1));
  return tape.grad(in);
}

SaliencyMap to_map(const Matrix& grad, SaliencyVariant variant, std::optional<int> cls) {
  SaliencyMap m;
  m.variant = variant;
  m.class_index = cls;
  m.values.resize(static_cast<std::size_t>(grad.rows()));
  for (ad::Index i = 0; i < grad.rows(); ++i) {
    m.values[static_cast<std::size_t>(i)] = grad.row(i).cwiseAbs().maxCoeff();
  }
  return m;
}

}  // namespace

LogitFn logits_of(const model::Classifier& classifier) {
  return [&classifier](ad::Tape& tape, ad::Var x) { return classifier.logits(tape, x); };
}

Matrix probability_gradient(const LogitFn& logits, const Matrix& x, int cls) {
  return input_gradient(logits, x, cls, true);
}

Matrix score_gradient(const LogitFn& logits, const Matrix& x, int cls) {
  return input_gradient(logits, x, cls, false);
}

SaliencyMap probability_saliency(const LogitFn& logits, const Matrix& x, int cls) {
  return to_map(probability_gradient(logits, x, cls), SaliencyVariant::kProbability, cls);
}

SaliencyMap score_saliency(const LogitFn& logits, const Matrix& x, int cls) {
  return to_map(score_gradient(logits, x, cls), SaliencyVariant::kUnnormalized, cls);
}

std::vector<SaliencyMap> saliency(const model::Classifier& classifier, const Matrix& x,
                                  SaliencyVariant variant) {
  const LogitFn fn = logits_of(classifier);
  if (variant == SaliencyVariant::kProbability) return {probability_saliency(fn, x, 0)};
  std::vector<SaliencyMap> maps;
  for (int c = 0; c < model::kClassCount; ++c) maps.push_back(score_saliency(fn, x, c));
  return maps;
}

}  // namespace dvae::evaluation
