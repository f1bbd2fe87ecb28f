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

#include "dvae/training/loss.hpp"

#include <cmath>
#include <numbers>

#include "dvae/common/error.hpp"

namespace dvae::training {

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  kl_term += o.kl_term;
  recon_term += o.recon_term;
  prior_y_term += o.prior_y_term;
  class_term += o.class_term;
  total += o.total;
  return *this;
}

LossBreakdown& LossBreakdown::operator*=(double f) {
  kl_term *= f;
  recon_term *= f;
  prior_y_term *= f;
  class_term *= f;
  total *= f;
  return *this;
}

Var kl_gaussian(Var mu, Var logvar) {
  DVAE_REQUIRE(mu.rows() == logvar.rows() && mu.cols() == logvar.cols(),
               "kl_gaussian: shape mismatch");
  Var inner = ad::sub(ad::add_scalar(ad::add(ad::mul(mu, mu), ad::exp(logvar)), -1.0),
                      logvar);
  return ad::scale(ad::sum(inner), 0.5);
}

double kl_gaussian(const Matrix& mu, const Matrix& logvar) {
  DVAE_REQUIRE(mu.rows() == logvar.rows() && mu.cols() == logvar.cols(),
               "kl_gaussian: shape mismatch");
  return 0.5 * (mu.array().square() + logvar.array().exp() - 1.0 - logvar.array())
                   .sum();
}

Var reparameterize(Var mu, Var logvar, const Matrix& eps) {
  DVAE_REQUIRE(mu.rows() == eps.rows() && mu.cols() == eps.cols() &&
                   logvar.rows() == eps.rows() && logvar.cols() == eps.cols(),
               "reparameterize: shape mismatch");
  Tape& tape = mu.tape();
  return ad::add(mu, ad::mul(ad::exp(ad::scale(logvar, 0.5)), tape.constant(eps)));
}

Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps) {
  DVAE_REQUIRE(mu.rows() == eps.rows() && mu.cols() == eps.cols() &&
                   logvar.rows() == eps.rows() && logvar.cols() == eps.cols(),
               "reparameterize: shape mismatch");
  return (mu.array() + (0.5 * logvar.array()).exp() * eps.array()).matrix();
}

Var scaled_squared_error(Var x, Var xhat, double v) {
  DVAE_REQUIRE(v > 0.0, "likelihood variance v must be positive");
  return ad::scale(ad::sum_squares(ad::sub(x, xhat)), 1.0 / (2.0 * v));
}

Var gaussian_loglik(Var x, Var xhat, double v) {
  const double n = static_cast<double>(x.rows() * x.cols());
  const double normalizer = 0.5 * n * std::log(2.0 * std::numbers::pi * v);
  return ad::add_scalar(ad::scale(scaled_squared_error(x, xhat, v), -1.0),
                        -normalizer);
}

Var cross_entropy(Var logits, int label) {
  DVAE_REQUIRE(logits.rows() == 1 && label >= 0 && label < logits.cols(),
               "cross_entropy: bad label or logits shape");
  return ad::scale(ad::slice(ad::log_softmax(logits), 0, label, 1, 1), -1.0);
}

LossVars dvae_loss(Tape& tape, const model::DvaeModel& model, const Matrix& input,
                   const Matrix& target, int label, const DvaeLossOptions& options,
                   const Matrix& eps) {
  DVAE_REQUIRE(options.v > 0.0, "likelihood variance v must be positive");
  DVAE_REQUIRE(options.alpha >= 0.0, "alpha must be non-negative");
  Var x_in = tape.constant(input);
  Var x_target = tape.constant(target);
  Var y = tape.constant(model::one_hot(label));

  Var features = model.features(tape, x_in);
  Var class_term = ad::slice(ad::log_softmax(model.label_logits(tape, features)),
                             0, label, 1, 1);
  auto [mu, logvar] = model.latent(tape, features, y);
  Var z = reparameterize(mu, logvar, eps);
  Var xhat = model.decode(tape, z, y);

  Var kl = kl_gaussian(mu, logvar);
  Var recon = gaussian_loglik(x_target, xhat, options.v);
  Var total = ad::add_scalar(
      ad::sub(ad::sub(kl, recon), ad::scale(class_term, options.alpha)),
      -kLogPriorY);

  LossVars out{total, {}};
  out.parts.kl_term = kl.value()(0, 0);
  out.parts.recon_term = recon.value()(0, 0);
  out.parts.prior_y_term = kLogPriorY;
  out.parts.class_term = class_term.value()(0, 0);
  out.parts.total = total.value()(0, 0);
  return out;
}

VaeForward vae_forward(Tape& tape, const model::VaeModel& model,
                       const Matrix& input, const Matrix& target,
                       const Matrix& eps) {
  VaeForward f;
  Var features = model.features(tape, tape.constant(input));
  auto lv = model.latent(tape, features);
  f.mu = lv.mu;
  f.logvar = lv.logvar;
  f.xhat = model.decode(tape, reparameterize(lv.mu, lv.logvar, eps));
  f.target = tape.constant(target);
  f.squared_error = (target - f.xhat.value()).squaredNorm();
  return f;
}

LossVars vae_loss(const VaeForward& fwd, double v, double kl_weight,
                  bool include_constants) {
  DVAE_REQUIRE(kl_weight >= 0.0, "KL weight must be non-negative");
  Var kl = kl_gaussian(fwd.mu, fwd.logvar);
  Var recon = include_constants ? gaussian_loglik(fwd.target, fwd.xhat, v)
                                : ad::scale(scaled_squared_error(fwd.target, fwd.xhat, v),
                                            -1.0);
  Var total = ad::sub(ad::scale(kl, kl_weight), recon);
  LossVars out{total, {}};
  out.parts.kl_term = kl.value()(0, 0);
  out.parts.recon_term = recon.value()(0, 0);
  out.parts.total = total.value()(0, 0);
  return out;
}

}  // namespace dvae::training
