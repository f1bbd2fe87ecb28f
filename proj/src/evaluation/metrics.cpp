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

#include "dvae/evaluation/metrics.hpp"

#include <cmath>

#include "dvae/common/error.hpp"
#include "dvae/common/parallel.hpp"
#include "dvae/evaluation/procedures.hpp"

namespace dvae::evaluation {

namespace {

nlohmann::json fold_json(const FoldMetrics& m) {
  return {{"ca", m.ca}, {"osrsr", m.osrsr}, {"ssrsr", m.ssrsr}, {"re", m.re},
          {"samples", m.samples}};
}

}  // namespace

MetricsReport MetricsReport::aggregate(std::vector<FoldMetrics> folds) {
  MetricsReport r;
  r.folds = std::move(folds);
  const double n = static_cast<double>(r.folds.size());
  if (r.folds.empty()) return r;
  for (const auto& f : r.folds) {
    r.mean.ca += f.ca / n;
    r.mean.osrsr += f.osrsr / n;
    r.mean.ssrsr += f.ssrsr / n;
    r.mean.re += f.re / n;
    r.mean.samples += f.samples;
  }
  if (r.folds.size() > 1) {
    for (const auto& f : r.folds) {
      r.stddev.ca += std::pow(f.ca - r.mean.ca, 2);
      r.stddev.osrsr += std::pow(f.osrsr - r.mean.osrsr, 2);
      r.stddev.ssrsr += std::pow(f.ssrsr - r.mean.ssrsr, 2);
      r.stddev.re += std::pow(f.re - r.mean.re, 2);
    }
    r.stddev.ca = std::sqrt(r.stddev.ca / (n - 1));
    r.stddev.osrsr = std::sqrt(r.stddev.osrsr / (n - 1));
    r.stddev.ssrsr = std::sqrt(r.stddev.ssrsr / (n - 1));
    r.stddev.re = std::sqrt(r.stddev.re / (n - 1));
  }
  return r;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json per_fold = nlohmann::json::array();
  for (std::size_t i = 0; i < folds.size(); ++i) {
    auto j = fold_json(folds[i]);
    j["fold"] = i;
    per_fold.push_back(j);
  }
  return {{"folds", per_fold}, {"mean", fold_json(mean)}, {"std", fold_json(stddev)}};
}

double reconstruction_error(const std::vector<ad::Matrix>& originals,
                            const std::vector<ad::Matrix>& reconstructions) {
  DVAE_REQUIRE(!originals.empty() && originals.size() == reconstructions.size(),
               "reconstruction_error: need equally many, non-empty meshes");
  double total = 0.0;
  for (std::size_t k = 0; k < originals.size(); ++k) {
    total += mesh::mean_vertex_distance(originals[k], reconstructions[k]);
  }
  return total / static_cast<double>(originals.size());
}

FoldMetrics compute_metrics(const model::DvaeModel& dvae,
                            const model::Classifier& classifier,
                            const training::LabeledSet& test,
                            const mesh::NormalizationStats& stats, std::size_t jobs) {
  DVAE_REQUIRE(!test.empty(), "compute_metrics: empty fold");
  const std::size_t n = test.size();
  std::vector<int> ca(n), os(n), ss(n);
  std::vector<ad::Matrix> raw(n), recon(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const int y = test.y[i];
    ca[i] = estimate_label(dvae, test.x[i]) == y;
    const Reconstructions r = reconstruct(dvae, test.x[i], y);
    os[i] = classifier.predict(r.opposite) == 1 - y;
    ss[i] = classifier.predict(r.same) == y;
    raw[i] = stats.invert(test.x[i]);
    recon[i] = stats.invert(r.same);
  });
  FoldMetrics m;
  m.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    m.ca += ca[i];
    m.osrsr += os[i];
    m.ssrsr += ss[i];
  }
  m.ca *= 100.0 / static_cast<double>(n);
  m.osrsr *= 100.0 / static_cast<double>(n);
  m.ssrsr *= 100.0 / static_cast<double>(n);
  m.re = reconstruction_error(raw, recon);
  return m;
}

double consistency_check(const model::DvaeModel& dvae,
                         const model::Classifier& classifier,
                         const training::LabeledSet& test, std::size_t jobs) {
  DVAE_REQUIRE(!test.empty(), "consistency_check: empty set");
  std::vector<int> agree(test.size());
  parallel_for(test.size(), jobs, [&](std::size_t i) {
    const int estimate = estimate_label(dvae, test.x[i]);
    agree[i] = classifier.predict(sex_preserve(dvae, test.x[i], estimate)) == estimate;
  });
  double sum = 0.0;
  for (int a : agree) sum += a;
  return sum / static_cast<double>(test.size());
}

}  // namespace dvae::evaluation
