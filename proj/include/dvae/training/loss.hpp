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

#include "dvae/model/models.hpp"

namespace dvae::training {

using ad::Matrix;
using ad::Tape;
using ad::Var;

/// log p(y) for the uniform class prior.
inline constexpr double kLogPriorY = -0.69314718055994530942;

/// Scalar terms of one objective evaluation. recon_term is the Gaussian
/// log-likelihood and class_term is log P_y[y]; total is the minimized value
/// kl - recon - prior_y - alpha * class.
struct LossBreakdown {
  double kl_term = 0.0;
  double recon_term = 0.0;
  double prior_y_term = 0.0;
  double class_term = 0.0;
  double total = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& o);
  LossBreakdown& operator*=(double f);
};

/// 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar).
Var kl_gaussian(Var mu, Var logvar);
double kl_gaussian(const Matrix& mu, const Matrix& logvar);

/// z = mu + exp(logvar / 2) * eps.
Var reparameterize(Var mu, Var logvar, const Matrix& eps);
Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps);

/// -|x - xhat|^2 / (2v) - (n/2) log(2 pi v), n = element count of x.
Var gaussian_loglik(Var x, Var xhat, double v);
/// Same without the constant normalizer.
Var scaled_squared_error(Var x, Var xhat, double v);

struct DvaeLossOptions {
  double alpha = 2.0;
  double v = 1.0;
};

struct LossVars {
  Var total;
  LossBreakdown parts;
};

/// Single-sample objective for the disentangled model. `input` feeds the
/// encoder (possibly masked); `target` is what the decoder must reproduce.
LossVars dvae_loss(Tape& tape, const model::DvaeModel& model, const Matrix& input,
                   const Matrix& target, int label, const DvaeLossOptions& options,
                   const Matrix& eps);

/// Forward half of the VAE objective, kept separate so v can be estimated
/// from a whole batch before the loss is formed.
struct VaeForward {
  Var mu, logvar, xhat, target;
  double squared_error = 0.0;
};
VaeForward vae_forward(Tape& tape, const model::VaeModel& model,
                       const Matrix& input, const Matrix& target,
                       const Matrix& eps);

/// kl_weight * KL - loglik(v). With include_constants false the
/// log(2 pi v) normalizer is dropped.
LossVars vae_loss(const VaeForward& fwd, double v,
                  double kl_weight = 1.0, bool include_constants = true);

/// -log softmax(logits)[label], the binary cross entropy for two classes.
Var cross_entropy(Var logits, int label);

}  // namespace dvae::training
