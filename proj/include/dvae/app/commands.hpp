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

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dvae/app/run_config.hpp"
#include "dvae/mesh/normalization.hpp"
#include "dvae/model/checkpoint.hpp"

namespace dvae::app {

/// Writes every message to the console and to the run's log.txt.
class RunLog {
 public:
  RunLog(std::ostream& console, const std::filesystem::path& file);
  void line(const std::string& text);

 private:
  std::ostream& console_;
  std::ofstream file_;
};

/// A run directory with the effective config echoed into it.
struct RunContext {
  RunConfig config;
  std::filesystem::path run_dir;
  RunLog* log = nullptr;
};

/// <root>/<name>, where name defaults to "<YYYYmmdd-HHMMSS>-<command>".
std::filesystem::path make_run_dir(const std::filesystem::path& root,
                                   const std::string& command,
                                   const std::optional<std::string>& name);

/// Default output root: $DVAE_MESH_OUT, else ./runs.
std::filesystem::path default_out_root();

void echo_config(const RunContext& ctx, const std::string& command);

/// Model plus the normalization and hierarchy recorded in its sidecar.
template <typename Model>
struct LoadedModel {
  Model model;
  mesh::NormalizationStats stats;
  nlohmann::json meta;
};

LoadedModel<model::DvaeModel> load_dvae(const std::filesystem::path& ckpt);
LoadedModel<model::VaeModel> load_vae(const std::filesystem::path& ckpt);
LoadedModel<model::Classifier> load_classifier(const std::filesystem::path& ckpt);

/// Labels accepted on the command line: male = class 0, female = class 1.
int parse_class(const std::string& name);
std::string class_name(int label);

struct GenOptions {
  std::optional<std::filesystem::path> output;  // default <run>/data
  bool perturb = false;
};
void cmd_gen(const RunContext& ctx, const GenOptions& o);

struct AlignOptions {
  std::filesystem::path data;
  std::optional<std::filesystem::path> output;  // default <run>/aligned
};
void cmd_align(const RunContext& ctx, const AlignOptions& o);

struct TrainOptions {
  std::string model;  // dvae | vae | c | crecon
  std::filesystem::path data;
  std::optional<std::filesystem::path> dvae;  // required for crecon
};
void cmd_train(const RunContext& ctx, const TrainOptions& o);

struct CvOptions {
  std::filesystem::path data;
};
void cmd_cv(const RunContext& ctx, const CvOptions& o);

struct TransformOptions {
  std::filesystem::path mesh;
  std::filesystem::path dvae;
  std::string as = "both";            // male | female | both
  std::optional<std::string> label;   // true label if known
};
void cmd_transform(const RunContext& ctx, const TransformOptions& o);

struct SaliencyOptions {
  std::filesystem::path mesh;
  std::filesystem::path classifier;
  std::string variant = "probability";  // probability | unnormalized
};
void cmd_saliency(const RunContext& ctx, const SaliencyOptions& o);

struct BenchOptions {
  std::filesystem::path data;
  std::filesystem::path c, dvae, vae, crecon;
  /// C for the VAE+C method; `c` when empty.
  std::filesystem::path vae_c;
};
void cmd_missing_bench(const RunContext& ctx, const BenchOptions& o);

struct ReportOptions {
  std::filesystem::path data;
  std::filesystem::path dvae, c;
};
void cmd_report(const RunContext& ctx, const ReportOptions& o);

}  // namespace dvae::app
