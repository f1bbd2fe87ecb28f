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

#include "dvae/evaluation/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "dvae/common/error.hpp"
#include "dvae/common/parallel.hpp"

namespace dvae::evaluation {

namespace {

std::map<int, std::vector<std::size_t>> by_class(const std::vector<std::size_t>& indices,
                                                 const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (auto i : indices) {
    DVAE_REQUIRE(i < labels.size(), "index out of range");
    groups[labels[i]].push_back(i);
  }
  return groups;
}

nlohmann::json metrics_json(const FoldMetrics& m) {
  return {{"ca", m.ca}, {"osrsr", m.osrsr}, {"ssrsr", m.ssrsr}, {"re", m.re},
          {"samples", m.samples}};
}

constexpr std::uint64_t kRetrainKey = 0xffff;
constexpr std::uint64_t kClassifierKey = 0xfffe;

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       int k, std::uint64_t seed) {
  DVAE_REQUIRE(k >= 2, "need at least two folds");
  DVAE_REQUIRE(labels.size() >= static_cast<std::size_t>(k),
               "fewer samples than folds");
  std::vector<std::size_t> all(labels.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Rng rng = substream(seed, {stream::kFolds});
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (auto& [label, members] : by_class(all, labels)) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) folds[next++ % folds.size()].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Split stratified_split(const std::vector<std::size_t>& indices,
                       const std::vector<int>& labels, double validation_fraction,
                       std::uint64_t seed) {
  DVAE_REQUIRE(validation_fraction > 0.0 && validation_fraction < 1.0,
               "validation fraction must lie in (0, 1)");
  Rng rng = substream(seed, {stream::kFolds, 1});
  Split s;
  for (auto& [label, members] : by_class(indices, labels)) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto nv = static_cast<std::size_t>(
        std::llround(validation_fraction * static_cast<double>(members.size())));
    s.validation.insert(s.validation.end(), members.begin(),
                        members.begin() + static_cast<std::ptrdiff_t>(nv));
    s.train.insert(s.train.end(), members.begin() + static_cast<std::ptrdiff_t>(nv),
                   members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

int select_cell(const std::vector<CellResult>& cells) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    if (c.failed) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const auto& b = cells[static_cast<std::size_t>(best)];
    if (c.validation_osrsr != b.validation_osrsr) {
      if (c.validation_osrsr > b.validation_osrsr) best = i;
    } else if (c.alpha != b.alpha) {
      if (c.alpha > b.alpha) best = i;
    } else if (c.v < b.v) {
      best = i;
    }
  }
  return best;
}

nlohmann::json CvResult::to_json() const {
  nlohmann::json jf = nlohmann::json::array();
  for (const auto& f : folds) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : f.cells) {
      cells.push_back({{"alpha", c.alpha}, {"v", c.v}, {"failed", c.failed},
                       {"validation_osrsr", c.validation_osrsr}, {"error", c.error}});
    }
    jf.push_back({{"fold", f.fold},
                  {"train_size", f.train.size()},
                  {"validation_size", f.validation.size()},
                  {"test_size", f.test.size()},
                  {"cells", cells},
                  {"selected_cell", f.selected_cell},
                  {"alpha", f.alpha},
                  {"v", f.v},
                  {"cell_trainings", f.cell_trainings},
                  {"retrains", f.retrains},
                  {"classifier_trainings", f.classifier_trainings},
                  {"failed", f.failed},
                  {"metrics", metrics_json(f.metrics)}});
  }
  return {{"folds", jf}, {"report", report.to_json()}};
}

CvResult nested_cv(const std::vector<ad::Matrix>& raw, const std::vector<int>& labels,
                   const model::HierarchyPtr& hierarchy, const HyperGrid& grid,
                   const FoldPlan& plan, const training::TrainConfig& train,
                   std::ostream* log) {
  DVAE_REQUIRE(raw.size() == labels.size() && !raw.empty(),
               "nested_cv: need labeled samples");
  DVAE_REQUIRE(grid.size() > 0, "nested_cv: empty grid");
  std::mutex log_mutex;
  auto say = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    *log << line << std::endl;
  };

  CvResult result;
  const auto outer = stratified_folds(labels, plan.outer_folds, plan.seed);
  std::vector<FoldMetrics> reported;
  for (int f = 0; f < plan.outer_folds; ++f) {
    FoldResult fr;
    fr.fold = f;
    fr.test = outer[static_cast<std::size_t>(f)];
    std::vector<std::size_t> tr;
    for (int g = 0; g < plan.outer_folds; ++g) {
      if (g == f) continue;
      const auto& fold = outer[static_cast<std::size_t>(g)];
      tr.insert(tr.end(), fold.begin(), fold.end());
    }
    std::sort(tr.begin(), tr.end());
    const Split split = stratified_split(
        tr, labels, plan.validation_fraction,
        substream_seed(plan.seed, {static_cast<std::uint64_t>(f)}));
    fr.train = split.train;
    fr.validation = split.validation;

    std::vector<ad::Matrix> tr_raw;
    for (auto i : tr) tr_raw.push_back(raw[i]);
    const auto stats = mesh::NormalizationStats::fit(tr_raw);
    const auto all = training::normalize(raw, labels, stats);
    const auto t_set = training::subset(all, fr.train);
    const auto v_set = training::subset(all, fr.validation);
    const auto tr_set = training::subset(all, tr);
    const auto te_set = training::subset(all, fr.test);

    training::TrainConfig base = train;
    base.stats = &stats;

    training::TrainConfig c_cfg = base;
    c_cfg.seed = substream_seed(train.seed, {static_cast<std::uint64_t>(f), kClassifierKey});
    model::Classifier classifier(model::classifier_architecture(*hierarchy), hierarchy,
                                 c_cfg.seed);
    training::train_classifier(classifier, tr_set, c_cfg);
    ++fr.classifier_trainings;
    say("fold " + std::to_string(f) + ": classifier trained on " +
        std::to_string(tr_set.size()) + " samples");

    fr.cells.resize(grid.size());
    std::size_t cell_jobs = std::max<std::size_t>(1, train.jobs);
    parallel_for(grid.size(), cell_jobs, [&](std::size_t cell) {
      CellResult& cr = fr.cells[cell];
      cr.alpha = grid.alphas[cell / grid.sqrt_v.size()];
      const double s = grid.sqrt_v[cell % grid.sqrt_v.size()];
      cr.v = s * s;
      training::TrainConfig cfg = base;
      cfg.alpha = cr.alpha;
      cfg.v = cr.v;
      cfg.jobs = 1;
      cfg.seed = substream_seed(train.seed, {static_cast<std::uint64_t>(f), cell});
      try {
        model::DvaeModel dvae(model::dvae_architecture(*hierarchy, train.latent),
                              hierarchy, cfg.seed);
        training::train_dvae(dvae, t_set, cfg);
        cr.validation_osrsr = compute_metrics(dvae, classifier, v_set, stats).osrsr;
        say("fold " + std::to_string(f) + " cell alpha=" + std::to_string(cr.alpha) +
            " v=" + std::to_string(cr.v) +
            " validation OSRSR=" + std::to_string(cr.validation_osrsr));
      } catch (const training::TrainingDiverged& e) {
        cr.failed = true;
        cr.error = e.what();
        say("warning: fold " + std::to_string(f) + " cell alpha=" +
            std::to_string(cr.alpha) + " v=" + std::to_string(cr.v) +
            " failed: " + e.what());
      }
    });
    fr.cell_trainings = static_cast<int>(grid.size());

    fr.selected_cell = select_cell(fr.cells);
    if (fr.selected_cell < 0) {
      fr.failed = true;
      say("warning: fold " + std::to_string(f) + ": every grid cell failed");
      result.folds.push_back(std::move(fr));
      continue;
    }
    const auto& chosen = fr.cells[static_cast<std::size_t>(fr.selected_cell)];
    fr.alpha = chosen.alpha;
    fr.v = chosen.v;

    training::TrainConfig cfg = base;
    cfg.alpha = fr.alpha;
    cfg.v = fr.v;
    cfg.seed = substream_seed(train.seed, {static_cast<std::uint64_t>(f), kRetrainKey});
    try {
      model::DvaeModel dvae(model::dvae_architecture(*hierarchy, train.latent), hierarchy,
                            cfg.seed);
      ++fr.retrains;
      training::train_dvae(dvae, tr_set, cfg);
      fr.metrics = compute_metrics(dvae, classifier, te_set, stats, train.jobs);
      reported.push_back(fr.metrics);
      say("fold " + std::to_string(f) + ": alpha=" + std::to_string(fr.alpha) +
          " v=" + std::to_string(fr.v) + " CA=" + std::to_string(fr.metrics.ca) +
          " OSRSR=" + std::to_string(fr.metrics.osrsr) +
          " SSRSR=" + std::to_string(fr.metrics.ssrsr) +
          " RE=" + std::to_string(fr.metrics.re));
    } catch (const training::TrainingDiverged& e) {
      fr.failed = true;
      say("warning: fold " + std::to_string(f) + " retrain failed: " + e.what());
    }
    result.folds.push_back(std::move(fr));
  }
  result.report = MetricsReport::aggregate(std::move(reported));
  return result;
}

}  // namespace dvae::evaluation
