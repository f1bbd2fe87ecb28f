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

#include "dvae/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <span>

#include "dvae/common/error.hpp"
#include "dvae/common/parallel.hpp"

namespace dvae::training {

double learning_rate(int epoch) {
  DVAE_REQUIRE(epoch >= 1, "epochs are counted from 1");
  if (epoch <= 200) return 6e-4;
  if (epoch <= 400) return 3e-4;
  return 1e-4;
}

TrainingDiverged::TrainingDiverged(int epoch, const std::string& detail)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                         ": " + detail),
      epoch_(epoch) {}

namespace {

using ad::Gradients;
using ad::ParameterSet;
using Batch = std::span<const std::size_t>;

struct BatchResult {
  Gradients grads;
  LossBreakdown loss;
  double v = 0.0;
};

using BatchFn = std::function<BatchResult(Batch batch, int epoch)>;

void validate(const TrainConfig& c, const LabeledSet& data) {
  DVAE_REQUIRE(!data.empty(), "training set is empty");
  DVAE_REQUIRE(data.x.size() == data.y.size(), "label count mismatch");
  DVAE_REQUIRE(c.batch_size >= 1, "batch size must be >= 1");
  DVAE_REQUIRE(c.epochs >= 1, "epoch count must be >= 1");
  DVAE_REQUIRE(c.v > 0.0, "likelihood variance v must be positive");
  DVAE_REQUIRE(c.alpha >= 0.0, "alpha must be non-negative");
  DVAE_REQUIRE(!c.augmentation || c.stats != nullptr,
               "augmentation needs normalization stats");
}

Matrix standard_normal(ad::Index rows, ad::Index cols, Rng& rng) {
  std::normal_distribution<double> n01;
  Matrix m(rows, cols);
  for (ad::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  return m;
}

Matrix epsilon_for(const TrainConfig& c, int epoch, std::size_t sample, int latent) {
  Rng rng = substream(c.seed, {stream::kEpsilon, static_cast<std::uint64_t>(epoch),
                               sample});
  return standard_normal(1, latent, rng);
}

Matrix input_for(const TrainConfig& c, const LabeledSet& data, int epoch,
                 std::size_t sample) {
  if (!c.augmentation) return data.x[sample];
  Rng rng = substream(c.seed, {stream::kAugment, static_cast<std::uint64_t>(epoch),
                               sample});
  return augment_missing(data.x[sample], *c.stats, *c.augmentation, rng);
}

/// Runs `fn` for every sample of a batch (in parallel when allowed) and sums
/// gradients and losses in batch order.
template <typename Fn>
BatchResult per_sample(Batch batch, const ParameterSet& params, std::size_t jobs,
                       Fn&& fn) {
  std::vector<Gradients> grads(batch.size());
  std::vector<LossBreakdown> losses(batch.size());
  parallel_for(batch.size(), jobs,
               [&](std::size_t k) { losses[k] = fn(batch[k], grads[k]); });
  BatchResult r{Gradients(params), {}, 0.0};
  for (std::size_t k = 0; k < batch.size(); ++k) {
    r.grads += grads[k];
    r.loss += losses[k];
  }
  return r;
}

void log_line(std::ostream& out, const EpochRecord& r) {
  out << r.epoch << ',' << r.loss.kl_term << ',' << r.loss.recon_term << ','
      << r.loss.class_term << ',' << r.loss.total << ',' << r.lr << '\n';
  out.flush();
}

History run(ParameterSet& params, const LabeledSet& data, const TrainConfig& c,
            const TrainHooks& hooks, const BatchFn& batch_fn) {
  ad::AdamState adam(params, c.adam);
  if (hooks.log) *hooks.log << "epoch,kl,recon,class,total,lr\n";
  History history;
  std::vector<std::size_t> order(data.size());
  for (int epoch = 1; epoch <= c.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = substream(c.seed, {stream::kShuffle, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = learning_rate(epoch);
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(c.batch_size)) {
      const std::size_t len =
          std::min<std::size_t>(static_cast<std::size_t>(c.batch_size), order.size() - start);
      Batch batch(order.data() + start, len);
      BatchResult r;
      try {
        r = batch_fn(batch, epoch);
      } catch (const NonFiniteError& e) {
        throw TrainingDiverged(epoch, e.what());
      }
      if (!std::isfinite(r.loss.total) || !r.grads.all_finite()) {
        throw TrainingDiverged(epoch, "non-finite loss or gradient");
      }
      r.grads *= 1.0 / static_cast<double>(len);
      ad::adam_step(params, r.grads, adam, rec.lr);
      rec.loss += r.loss;
      rec.v += r.v;
      ++batches;
    }
    rec.loss *= 1.0 / static_cast<double>(data.size());
    rec.v /= static_cast<double>(batches);
    history.push_back(rec);
    if (hooks.log) log_line(*hooks.log, rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (hooks.checkpoint && ((c.checkpoint_every > 0 && epoch % c.checkpoint_every == 0) ||
                             epoch == c.epochs)) {
      hooks.checkpoint(epoch);
    }
  }
  return history;
}

}  // namespace

History train_dvae(model::DvaeModel& model, const LabeledSet& data,
                   const TrainConfig& config, const TrainHooks& hooks) {
  validate(config, data);
  const DvaeLossOptions options{config.alpha, config.v};
  const int latent = model.architecture().latent;
  auto batch_fn = [&](Batch batch, int epoch) {
    BatchResult r = per_sample(
        batch, model.parameters(), config.jobs,
        [&](std::size_t i, Gradients& g) {
          Tape tape;
          LossVars l = dvae_loss(tape, model, input_for(config, data, epoch, i),
                                 data.x[i], data.y[i], options,
                                 epsilon_for(config, epoch, i, latent));
          g = ad::backward(tape, l.total, model.parameters());
          return l.parts;
        });
    r.v = config.v;
    return r;
  };
  return run(model.parameters(), data, config, hooks, batch_fn);
}

History train_vae(model::VaeModel& model, const LabeledSet& data,
                  const TrainConfig& config, const TrainHooks& hooks) {
  validate(config, data);
  const int latent = model.architecture().latent;
  auto batch_fn = [&](Batch batch, int epoch) {
    const std::size_t n = batch.size();
    std::vector<std::unique_ptr<Tape>> tapes(n);
    std::vector<VaeForward> fwd(n);
    parallel_for(n, config.jobs, [&](std::size_t k) {
      const std::size_t i = batch[k];
      tapes[k] = std::make_unique<Tape>();
      fwd[k] = vae_forward(*tapes[k], model, input_for(config, data, epoch, i),
                           data.x[i], epsilon_for(config, epoch, i, latent));
    });
    double sq = 0.0;
    for (const auto& f : fwd) sq += f.squared_error;
    const double coords = static_cast<double>(data.x[batch[0]].size());
    const double v = std::max(config.min_v, sq / (coords * static_cast<double>(n)));

    std::vector<Gradients> grads(n);
    std::vector<LossBreakdown> losses(n);
    parallel_for(n, config.jobs, [&](std::size_t k) {
      LossVars l = vae_loss(fwd[k], v);
      grads[k] = ad::backward(*tapes[k], l.total, model.parameters());
      losses[k] = l.parts;
    });
    BatchResult r{Gradients(model.parameters()), {}, v};
    for (std::size_t k = 0; k < n; ++k) {
      r.grads += grads[k];
      r.loss += losses[k];
    }
    return r;
  };
  return run(model.parameters(), data, config, hooks, batch_fn);
}

History train_classifier(model::Classifier& model, const LabeledSet& data,
                         const TrainConfig& config, const TrainHooks& hooks,
                         const InputTransform& transform) {
  validate(config, data);
  auto batch_fn = [&](Batch batch, int epoch) {
    return per_sample(batch, model.parameters(), config.jobs,
                      [&](std::size_t i, Gradients& g) {
                        Matrix input = input_for(config, data, epoch, i);
                        if (transform) input = transform(input);
                        Tape tape;
                        Var ce = cross_entropy(model.logits(tape, tape.constant(input)),
                                               data.y[i]);
                        g = ad::backward(tape, ce, model.parameters());
                        LossBreakdown l;
                        l.class_term = -ce.value()(0, 0);
                        l.total = ce.value()(0, 0);
                        return l;
                      });
  };
  return run(model.parameters(), data, config, hooks, batch_fn);
}

Matrix recon_difference_input(const Matrix& x, const Matrix& xhat0,
                              const Matrix& xhat1) {
  DVAE_REQUIRE(x.cols() == 3 && xhat0.rows() == x.rows() && xhat0.cols() == 3 &&
                   xhat1.rows() == x.rows() && xhat1.cols() == 3,
               "recon_difference_input: shape mismatch");
  Matrix out(x.rows(), 6);
  out.leftCols(3) = x - xhat0;
  out.rightCols(3) = x - xhat1;
  return out;
}

Matrix recon_difference_input(const model::DvaeModel& dvae, const Matrix& x) {
  const int estimate = model::argmax_label(dvae.encode_label(x));
  const Matrix mu = dvae.encode_latent(x, model::one_hot(estimate)).mu;
  return recon_difference_input(x, dvae.decode(mu, model::one_hot(0)),
                                dvae.decode(mu, model::one_hot(1)));
}

}  // namespace dvae::training
