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

// dvae-mesh: dataset generation, training, evaluation and export.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dvae/app/commands.hpp"

namespace fs = std::filesystem;
using namespace dvae::app;

int main(int argc, char** argv) {
  CLI::App app{"Discriminative VAE for 3D mesh shape analysis"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, out_root, run_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::vector<std::string> assignments;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_root, "Output root (default $DVAE_MESH_OUT or ./runs)");
  app.add_option("--run-name", run_name, "Run directory name (default timestamped)");
  app.add_option("--set", assignments, "Config override, e.g. train.epochs=50");

  GenOptions gen;
  std::optional<std::string> gen_output;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic labeled population");
  gen_cmd->add_option("--output", gen_output, "Dataset directory (default <run>/data)");
  gen_cmd->add_flag("--perturb", gen.perturb, "Apply a random similarity transform per subject");

  AlignOptions align;
  std::optional<std::string> align_output;
  auto* align_cmd = app.add_subcommand("align", "Procrustes-align a dataset to its template");
  align_cmd->add_option("data", align.data, "Dataset directory")->required();
  align_cmd->add_option("--output", align_output, "Output directory (default <run>/aligned)");

  TrainOptions train;
  std::optional<std::string> train_dvae;
  auto* train_cmd = app.add_subcommand("train", "Train a model on the non-held-out folds");
  train_cmd->add_option("model", train.model, "dvae, vae, c or crecon")
      ->required()
      ->check(CLI::IsMember({"dvae", "vae", "c", "crecon"}));
  train_cmd->add_option("--data", train.data, "Dataset directory")->required();
  train_cmd->add_option("--dvae", train_dvae, "DVAE checkpoint (crecon only)");

  CvOptions cv;
  auto* cv_cmd = app.add_subcommand("cv", "Nested cross-validation over the (alpha, v) grid");
  cv_cmd->add_option("--data", cv.data, "Dataset directory")->required();

  TransformOptions transform;
  std::optional<std::string> transform_label;
  auto* transform_cmd = app.add_subcommand("transform", "Export class-transformed meshes");
  transform_cmd->add_option("mesh", transform.mesh, "Input mesh (PLY or OBJ)")->required();
  transform_cmd->add_option("--dvae", transform.dvae, "DVAE checkpoint")->required();
  transform_cmd->add_option("--as", transform.as, "male, female or both")
      ->check(CLI::IsMember({"male", "female", "both"}));
  transform_cmd->add_option("--label", transform_label,
                            "True class of the input; estimated by q0 if omitted")
      ->check(CLI::IsMember({"male", "female"}));

  SaliencyOptions sal;
  auto* sal_cmd = app.add_subcommand("saliency", "Export classifier saliency maps");
  sal_cmd->add_option("mesh", sal.mesh, "Input mesh")->required();
  sal_cmd->add_option("--classifier", sal.classifier, "Classifier checkpoint")->required();
  sal_cmd->add_option("--variant", sal.variant, "probability or unnormalized")
      ->check(CLI::IsMember({"probability", "unnormalized"}));

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("missing-bench", "Accuracy under missing data");
  bench_cmd->add_option("--data", bench.data, "Dataset directory")->required();
  bench_cmd->add_option("--c", bench.c, "C checkpoint")->required();
  bench_cmd->add_option("--dvae", bench.dvae, "DVAE checkpoint")->required();
  bench_cmd->add_option("--vae", bench.vae, "VAE checkpoint")->required();
  bench_cmd->add_option("--crecon", bench.crecon, "C_recon checkpoint")->required();
  bench_cmd->add_option("--vae-c", bench.vae_c,
                        "C trained without augmentation, for VAE+C (default: --c)");

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Metrics and distance map on held-out data");
  report_cmd->add_option("--data", report.data, "Dataset directory")->required();
  report_cmd->add_option("--dvae", report.dvae, "DVAE checkpoint")->required();
  report_cmd->add_option("--c", report.c, "C checkpoint")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = config_path ? load_config(*config_path) : RunConfig{};
    apply_overrides(config, assignments);
    if (seed) {
      config.seed = *seed;
      config.folds.seed = *seed;
    }
    if (jobs) config.jobs = *jobs;

    const std::string command = app.get_subcommands().front()->get_name();
    const fs::path root = out_root ? fs::path(*out_root) : default_out_root();
    const fs::path run_dir = make_run_dir(root, command, run_name);
    RunLog log(std::cout, run_dir / "log.txt");
    const RunContext ctx{config, run_dir, &log};
    echo_config(ctx, command);
    log.line("run directory: " + run_dir.string());

    if (*gen_cmd) {
      if (gen_output) gen.output = fs::path(*gen_output);
      cmd_gen(ctx, gen);
    } else if (*align_cmd) {
      if (align_output) align.output = fs::path(*align_output);
      cmd_align(ctx, align);
    } else if (*train_cmd) {
      if (train_dvae) train.dvae = fs::path(*train_dvae);
      cmd_train(ctx, train);
    } else if (*cv_cmd) {
      cmd_cv(ctx, cv);
    } else if (*transform_cmd) {
      transform.label = transform_label;
      cmd_transform(ctx, transform);
    } else if (*sal_cmd) {
      cmd_saliency(ctx, sal);
    } else if (*bench_cmd) {
      cmd_missing_bench(ctx, bench);
    } else if (*report_cmd) {
      cmd_report(ctx, report);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
