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

#include "dvae/app/run_config.hpp"

#include <fstream>
#include <set>

#include "dvae/common/error.hpp"

namespace dvae::app {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
  DVAE_REQUIRE(j.is_object(), "config section '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ContractViolation("unknown config key '" +
                              (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {
      {"seed", seed},
      {"jobs", jobs},
      {"population", population.to_json()},
      {"train",
       {{"alpha", train.alpha},
        {"v", train.v},
        {"latent", train.latent},
        {"batch_size", train.batch_size},
        {"epochs", train.epochs},
        {"checkpoint_every", train.checkpoint_every},
        {"augment", train.augment},
        {"keep_probability", train.keep_probability},
        {"max_fraction", train.max_fraction}}},
      {"hierarchy", {{"factors", hierarchy_factors}}},
      {"folds",
       {{"outer_folds", folds.outer_folds},
        {"validation_fraction", folds.validation_fraction},
        {"holdout_fold", holdout_fold}}},
      {"grid", {{"alphas", grid.alphas}, {"sqrt_v", grid.sqrt_v}}},
      {"missing", {{"fractions", missing_fractions}}},
  };
}

RunConfig RunConfig::from_json(const nlohmann::json& j) { return from_json(j, RunConfig{}); }

RunConfig RunConfig::from_json(const nlohmann::json& j, RunConfig c) {
  reject_unknown(j, {"seed", "jobs", "population", "train", "hierarchy", "folds", "grid",
                     "missing"},
                 "");
  try {
    read(j, "seed", c.seed);
    read(j, "jobs", c.jobs);
    if (j.contains("population")) {
      nlohmann::json merged = c.population.to_json();
      reject_unknown(j["population"], [&] {
        std::set<std::string> keys;
        for (const auto& [k, _] : merged.items()) keys.insert(k);
        return keys;
      }(), "population");
      merged.update(j["population"]);
      c.population = synthetic::PopulationSpec::from_json(merged);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      reject_unknown(t, {"alpha", "v", "latent", "batch_size", "epochs",
                         "checkpoint_every", "augment", "keep_probability",
                         "max_fraction"},
                     "train");
      read(t, "alpha", c.train.alpha);
      read(t, "v", c.train.v);
      read(t, "latent", c.train.latent);
      read(t, "batch_size", c.train.batch_size);
      read(t, "epochs", c.train.epochs);
      read(t, "checkpoint_every", c.train.checkpoint_every);
      read(t, "augment", c.train.augment);
      read(t, "keep_probability", c.train.keep_probability);
      read(t, "max_fraction", c.train.max_fraction);
    }
    if (j.contains("hierarchy")) {
      reject_unknown(j["hierarchy"], {"factors"}, "hierarchy");
      read(j["hierarchy"], "factors", c.hierarchy_factors);
    }
    if (j.contains("folds")) {
      const auto& f = j["folds"];
      reject_unknown(f, {"outer_folds", "validation_fraction", "holdout_fold"}, "folds");
      read(f, "outer_folds", c.folds.outer_folds);
      read(f, "validation_fraction", c.folds.validation_fraction);
      read(f, "holdout_fold", c.holdout_fold);
    }
    if (j.contains("grid")) {
      reject_unknown(j["grid"], {"alphas", "sqrt_v"}, "grid");
      read(j["grid"], "alphas", c.grid.alphas);
      read(j["grid"], "sqrt_v", c.grid.sqrt_v);
    }
    if (j.contains("missing")) {
      reject_unknown(j["missing"], {"fractions"}, "missing");
      read(j["missing"], "fractions", c.missing_fractions);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("bad config value: ") + e.what());
  }
  c.folds.seed = c.seed;
  DVAE_REQUIRE(c.train.v > 0.0, "train.v must be positive");
  DVAE_REQUIRE(c.train.alpha >= 0.0, "train.alpha must be non-negative");
  DVAE_REQUIRE(c.train.epochs >= 1 && c.train.batch_size >= 1,
               "train.epochs and train.batch_size must be >= 1");
  DVAE_REQUIRE(c.folds.outer_folds >= 2, "folds.outer_folds must be >= 2");
  DVAE_REQUIRE(c.holdout_fold >= -1 && c.holdout_fold < c.folds.outer_folds,
               "folds.holdout_fold must be -1 or a fold index");
  return c;
}

training::TrainConfig RunConfig::train_config() const {
  training::TrainConfig t;
  t.alpha = train.alpha;
  t.v = train.v;
  t.latent = train.latent;
  t.batch_size = train.batch_size;
  t.epochs = train.epochs;
  t.checkpoint_every = train.checkpoint_every;
  t.seed = seed;
  t.jobs = jobs;
  if (train.augment) {
    t.augmentation = training::MissingDataPolicy{train.keep_probability, train.max_fraction};
  }
  return t;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments) {
  nlohmann::json patch = nlohmann::json::object();
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    DVAE_REQUIRE(eq != std::string::npos && eq > 0, "override must look like key=value: " + a);
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      value = text;
    }
    nlohmann::json* node = &patch;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      DVAE_REQUIRE(!part.empty(), "malformed override key: " + key);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  config = RunConfig::from_json(patch, config);
}

}  // namespace dvae::app
