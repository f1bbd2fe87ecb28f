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

#include "dvae/app/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "dvae/common/error.hpp"
#include "dvae/evaluation/maps.hpp"
#include "dvae/evaluation/metrics.hpp"
#include "dvae/evaluation/missing.hpp"
#include "dvae/evaluation/procedures.hpp"
#include "dvae/evaluation/saliency.hpp"
#include "dvae/mesh/hierarchy.hpp"
#include "dvae/mesh/mesh_io.hpp"
#include "dvae/mesh/procrustes.hpp"

namespace dvae::app {

namespace fs = std::filesystem;
using ad::Matrix;

RunLog::RunLog(std::ostream& console, const fs::path& file)
    : console_(console), file_(file, std::ios::app) {}

void RunLog::line(const std::string& text) {
  console_ << text << std::endl;
  if (file_) file_ << text << std::endl;
}

namespace {

void say(const RunContext& ctx, const std::string& text) {
  if (ctx.log) ctx.log->line(text);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

model::HierarchyPtr build_hierarchy(const Matrix& template_coords,
                                    const std::vector<mesh::Triangle>& faces,
                                    const std::vector<int>& factors) {
  const mesh::TemplateConnectivity conn(static_cast<std::size_t>(template_coords.rows()),
                                        faces);
  return std::make_shared<const mesh::SamplingHierarchy>(
      mesh::build_sampling_hierarchy(template_coords, conn, factors));
}

struct SplitPositions {
  std::vector<std::size_t> train, test;
};

SplitPositions holdout_split(const synthetic::Dataset& d, const RunConfig& c) {
  SplitPositions s;
  if (c.holdout_fold < 0) {
    for (std::size_t i = 0; i < d.meshes.size(); ++i) s.train.push_back(i);
    return s;
  }
  const auto folds =
      evaluation::stratified_folds(d.labels, c.folds.outer_folds, c.seed);
  s.test = folds[static_cast<std::size_t>(c.holdout_fold)];
  for (int f = 0; f < c.folds.outer_folds; ++f) {
    if (f == c.holdout_fold) continue;
    const auto& fold = folds[static_cast<std::size_t>(f)];
    s.train.insert(s.train.end(), fold.begin(), fold.end());
  }
  std::sort(s.train.begin(), s.train.end());
  return s;
}

std::vector<std::size_t> ids_at(const synthetic::Dataset& d,
                                const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> ids;
  for (auto p : positions) ids.push_back(d.ids[p]);
  return ids;
}

/// Dataset positions of the test subjects recorded in a sidecar; every
/// subject when the model was trained without a holdout.
std::vector<std::size_t> test_positions(const synthetic::Dataset& d,
                                        const nlohmann::json& meta) {
  std::vector<std::size_t> out;
  const auto ids = meta.value("test_ids", std::vector<std::size_t>{});
  if (ids.empty()) {
    for (std::size_t i = 0; i < d.meshes.size(); ++i) out.push_back(i);
    return out;
  }
  for (auto id : ids) {
    const auto it = std::find(d.ids.begin(), d.ids.end(), id);
    if (it == d.ids.end()) {
      throw CorrespondenceError("test subject " + std::to_string(id) +
                                " is not in the dataset");
    }
    out.push_back(static_cast<std::size_t>(it - d.ids.begin()));
  }
  return out;
}

training::LabeledSet normalized_subset(const synthetic::Dataset& d,
                                       const std::vector<std::size_t>& positions,
                                       const mesh::NormalizationStats& stats) {
  training::LabeledSet s;
  for (auto p : positions) s.push_back(stats.apply(d.meshes[p]), d.labels[p]);
  return s;
}

template <typename Model>
LoadedModel<Model> load_bundle(const fs::path& ckpt) {
  const auto meta = model::read_sidecar(ckpt);
  const fs::path dir = ckpt.parent_path();
  auto h = std::make_shared<const mesh::SamplingHierarchy>(
      mesh::load_hierarchy(resolve(dir, meta.at("hierarchy").get<std::string>())));
  auto stats = mesh::NormalizationStats::from_json(
      read_json(resolve(dir, meta.at("normalization").get<std::string>())));
  Model m = model::load_model<Model>(ckpt, std::move(h));
  return LoadedModel<Model>{std::move(m), std::move(stats), meta};
}

Matrix read_subject(const fs::path& path, const model::MeshModel& m) {
  const auto raw = mesh::read_mesh(path);
  if (raw.vertices.rows() != m.vertex_count()) {
    throw CorrespondenceError(path.string() + " has " +
                              std::to_string(raw.vertices.rows()) +
                              " vertices; the model expects " +
                              std::to_string(m.vertex_count()));
  }
  return raw.vertices;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return out.str();
}

}  // namespace

fs::path default_out_root() {
  if (const char* env = std::getenv("DVAE_MESH_OUT"); env && *env) return env;
  return "runs";
}

fs::path make_run_dir(const fs::path& root, const std::string& command,
                      const std::optional<std::string>& name) {
  fs::path dir = root / (name ? *name : timestamp() + "-" + command);
  fs::create_directories(dir);
  return dir;
}

void echo_config(const RunContext& ctx, const std::string& command) {
  nlohmann::json j = ctx.config.to_json();
  j["command"] = command;
  write_json(ctx.run_dir / "config.json", j);
}

LoadedModel<model::DvaeModel> load_dvae(const fs::path& ckpt) {
  return load_bundle<model::DvaeModel>(ckpt);
}
LoadedModel<model::VaeModel> load_vae(const fs::path& ckpt) {
  return load_bundle<model::VaeModel>(ckpt);
}
LoadedModel<model::Classifier> load_classifier(const fs::path& ckpt) {
  return load_bundle<model::Classifier>(ckpt);
}

int parse_class(const std::string& name) {
  if (name == "male" || name == "0") return 0;
  if (name == "female" || name == "1") return 1;
  throw ContractViolation("unknown class '" + name + "' (expected male or female)");
}

std::string class_name(int label) { return label == 0 ? "male" : "female"; }

void cmd_gen(const RunContext& ctx, const GenOptions& o) {
  const fs::path out = o.output ? *o.output : ctx.run_dir / "data";
  auto pop = synthetic::generate(ctx.config.population, ctx.config.seed);
  if (o.perturb) {
    for (auto& s : pop.samples) {
      Rng rng = substream(ctx.config.seed, {stream::kPerturb, s.id});
      synthetic::pre_alignment_perturb(s.coords, rng);
    }
  }
  synthetic::write_dataset(out, pop);
  say(ctx, "wrote " + std::to_string(pop.samples.size()) + " subjects (" +
               std::to_string(pop.template_coords.rows()) + " vertices, |R| = " +
               std::to_string(pop.region.size()) + ") to " + out.string());
}

void cmd_align(const RunContext& ctx, const AlignOptions& o) {
  const fs::path out = o.output ? *o.output : ctx.run_dir / "aligned";
  fs::create_directories(out);
  auto manifest = read_json(o.data / "manifest.json");
  const auto tmpl = mesh::read_mesh(o.data / manifest.at("template").get<std::string>());
  double worst = 0.0;
  for (auto& s : manifest.at("subjects")) {
    const std::string file = s.at("file").get<std::string>();
    auto m = mesh::read_mesh(o.data / file);
    if (m.vertices.rows() != tmpl.vertices.rows()) {
      throw CorrespondenceError(file + ": vertex count differs from the template");
    }
    const auto a = mesh::procrustes_align(m.vertices, tmpl.vertices);
    mesh::write_mesh(out / file, {a.aligned, m.faces, {}});
    s["residual"] = a.residual;
    worst = std::max(worst, a.residual);
  }
  manifest["aligned"] = true;
  mesh::write_mesh(out / manifest.at("template").get<std::string>(), tmpl);
  write_json(out / "manifest.json", manifest);
  if (fs::exists(o.data / "regions.json")) {
    fs::copy_file(o.data / "regions.json", out / "regions.json",
                  fs::copy_options::overwrite_existing);
  }
  say(ctx, "aligned " + std::to_string(manifest["subjects"].size()) +
               " subjects to the template; largest residual " + std::to_string(worst));
}

void cmd_train(const RunContext& ctx, const TrainOptions& o) {
  const RunConfig& c = ctx.config;
  const auto d = synthetic::read_dataset(o.data);
  const auto split = holdout_split(d, c);

  std::optional<LoadedModel<model::DvaeModel>> dvae;
  model::HierarchyPtr h;
  mesh::NormalizationStats stats;
  if (o.model == "crecon") {
    if (!o.dvae) throw ContractViolation("train crecon needs --dvae CHECKPOINT");
    dvae.emplace(load_dvae(*o.dvae));
    h = dvae->model.hierarchy_ptr();
    stats = dvae->stats;
  } else if (o.model == "dvae" || o.model == "vae" || o.model == "c") {
    h = build_hierarchy(d.template_coords, d.faces, c.hierarchy_factors);
    std::vector<Matrix> train_raw;
    for (auto p : split.train) train_raw.push_back(d.meshes[p]);
    stats = mesh::NormalizationStats::fit(train_raw);
  } else {
    throw ContractViolation("unknown model '" + o.model +
                            "' (expected dvae, vae, c or crecon)");
  }
  mesh::save_hierarchy(ctx.run_dir / "hierarchy.bin", *h);
  write_json(ctx.run_dir / "normalization.json", stats.to_json());

  const auto train_set = normalized_subset(d, split.train, stats);
  training::TrainConfig cfg = c.train_config();
  cfg.stats = &stats;

  nlohmann::json meta = {{"kind", o.model},
                         {"seed", c.seed},
                         {"train", c.to_json()["train"]},
                         {"hierarchy_factors", c.hierarchy_factors},
                         {"normalization", "normalization.json"},
                         {"hierarchy", "hierarchy.bin"},
                         {"data", fs::absolute(o.data).string()},
                         {"holdout_fold", c.holdout_fold},
                         {"outer_folds", c.folds.outer_folds},
                         {"train_ids", ids_at(d, split.train)},
                         {"test_ids", ids_at(d, split.test)}};
  if (o.dvae) meta["dvae"] = fs::absolute(*o.dvae).string();

  std::ofstream csv(ctx.run_dir / "train_log.csv");
  fs::create_directories(ctx.run_dir / "checkpoints");
  training::TrainHooks hooks;
  hooks.log = &csv;
  hooks.on_epoch = [&](const training::EpochRecord& r) {
    if (r.epoch == 1 || r.epoch % 50 == 0 || r.epoch == cfg.epochs) {
      std::ostringstream s;
      s << o.model << " epoch " << r.epoch << " total " << r.loss.total << " lr " << r.lr;
      say(ctx, s.str());
    }
  };

  const fs::path final_path = ctx.run_dir / (o.model + ".ckpt");
  auto run = [&](auto& m, auto&& fit) {
    hooks.checkpoint = [&](int epoch) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04d.ckpt", epoch);
      nlohmann::json j = meta;
      j["epochs_completed"] = epoch;
      j["normalization"] = "../normalization.json";
      j["hierarchy"] = "../hierarchy.bin";
      model::save_checkpoint(ctx.run_dir / "checkpoints" / name, m, j);
    };
    fit(m);
    meta["epochs_completed"] = cfg.epochs;
    model::save_checkpoint(final_path, m, meta);
  };

  if (o.model == "dvae") {
    model::DvaeModel m(model::dvae_architecture(*h, cfg.latent), h, cfg.seed);
    run(m, [&](auto& mm) { training::train_dvae(mm, train_set, cfg, hooks); });
  } else if (o.model == "vae") {
    model::VaeModel m(model::vae_architecture(*h, cfg.latent + 2), h, cfg.seed);
    run(m, [&](auto& mm) { training::train_vae(mm, train_set, cfg, hooks); });
  } else if (o.model == "c") {
    model::Classifier m(model::classifier_architecture(*h, 3), h, cfg.seed);
    run(m, [&](auto& mm) { training::train_classifier(mm, train_set, cfg, hooks); });
  } else {
    model::Classifier m(model::classifier_architecture(*h, 6), h, cfg.seed);
    const model::DvaeModel& recon = dvae->model;
    run(m, [&](auto& mm) {
      training::train_classifier(mm, train_set, cfg, hooks, [&](const Matrix& x) {
        return training::recon_difference_input(recon, x);
      });
    });
  }
  say(ctx, "saved " + final_path.string());
}

void cmd_cv(const RunContext& ctx, const CvOptions& o) {
  const RunConfig& c = ctx.config;
  const auto d = synthetic::read_dataset(o.data);
  const auto h = build_hierarchy(d.template_coords, d.faces, c.hierarchy_factors);
  std::ofstream progress(ctx.run_dir / "cv_progress.txt");
  const auto result = evaluation::nested_cv(d.meshes, d.labels, h, c.grid, c.folds,
                                            c.train_config(), &progress);
  write_json(ctx.run_dir / "cv.json", result.to_json());
  const auto& r = result.report;
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << "CA " << r.mean.ca << " +- " << r.stddev.ca
    << " | OSRSR " << r.mean.osrsr << " +- " << r.stddev.osrsr << " | SSRSR "
    << r.mean.ssrsr << " +- " << r.stddev.ssrsr << " | RE " << std::setprecision(4)
    << r.mean.re << " +- " << r.stddev.re << " over " << r.folds.size() << " folds";
  say(ctx, s.str());
}

void cmd_transform(const RunContext& ctx, const TransformOptions& o) {
  const auto b = load_dvae(o.dvae);
  const Matrix raw = read_subject(o.mesh, b.model);
  const Matrix x = b.stats.apply(raw);
  int label = 0;
  if (o.label) {
    label = parse_class(*o.label);
  } else {
    label = evaluation::estimate_label(b.model, x);
    say(ctx, "no label given for " + o.mesh.string() +
                 "; using q0's estimate instead: " + class_name(label));
  }
  std::vector<int> targets;
  if (o.as == "both") {
    targets = {0, 1};
  } else {
    targets = {parse_class(o.as)};
  }
  const auto r = evaluation::reconstruct(b.model, x, label);
  const auto& faces = b.model.hierarchy().faces.front();
  const std::string stem = o.mesh.stem().string();
  for (int t : targets) {
    const Matrix out = b.stats.invert(t == label ? r.same : r.opposite);
    const fs::path mesh_path = ctx.run_dir / (stem + "_as_" + class_name(t) + ".ply");
    mesh::write_mesh(mesh_path, {out, faces, {}});
    std::vector<double> disp(static_cast<std::size_t>(out.rows()));
    for (ad::Index i = 0; i < out.rows(); ++i) {
      disp[static_cast<std::size_t>(i)] = (out.row(i) - raw.row(i)).norm();
    }
    mesh::save_scalar_map(ctx.run_dir / (stem + "_as_" + class_name(t) + "_displacement.ply"),
                          out, faces, disp);
    say(ctx, "wrote " + mesh_path.string());
  }
}

void cmd_saliency(const RunContext& ctx, const SaliencyOptions& o) {
  const auto b = load_classifier(o.classifier);
  if (b.model.architecture().input_channels != 3) {
    throw ContractViolation("saliency needs a classifier over mesh coordinates (C)");
  }
  evaluation::SaliencyVariant variant;
  if (o.variant == "probability") {
    variant = evaluation::SaliencyVariant::kProbability;
  } else if (o.variant == "unnormalized") {
    variant = evaluation::SaliencyVariant::kUnnormalized;
  } else {
    throw ContractViolation("unknown saliency variant '" + o.variant + "'");
  }
  const Matrix raw = read_subject(o.mesh, b.model);
  const auto maps = evaluation::saliency(b.model, b.stats.apply(raw), variant);
  const auto& faces = b.model.hierarchy().faces.front();
  const std::string stem = o.mesh.stem().string();
  for (const auto& m : maps) {
    std::string name = stem + "_saliency_" + o.variant;
    if (variant == evaluation::SaliencyVariant::kUnnormalized) {
      name += "_" + class_name(*m.class_index);
    }
    mesh::save_scalar_map(ctx.run_dir / (name + ".ply"), raw, faces, m.values);
    say(ctx, "wrote " + (ctx.run_dir / (name + ".ply")).string());
  }
}

void cmd_missing_bench(const RunContext& ctx, const BenchOptions& o) {
  const auto d = synthetic::read_dataset(o.data);
  const auto c = load_classifier(o.c);
  const auto dvae = load_dvae(o.dvae);
  const auto vae = load_vae(o.vae);
  const auto crecon = load_classifier(o.crecon);
  std::optional<LoadedModel<model::Classifier>> vae_c;
  if (!o.vae_c.empty()) vae_c = load_classifier(o.vae_c);
  const auto close = [&](const mesh::NormalizationStats& s) {
    return s.mean().isApprox(dvae.stats.mean(), 1e-9) &&
           s.stddev().isApprox(dvae.stats.stddev(), 1e-9);
  };
  if (!close(c.stats) || !close(vae.stats) || !close(crecon.stats) ||
      (vae_c && !close(vae_c->stats))) {
    say(ctx, "warning: models were trained with different normalizations; "
             "using the DVAE's for every method");
  }
  const auto test = normalized_subset(d, test_positions(d, dvae.meta), dvae.stats);
  const auto result = evaluation::missing_benchmark(
      {&c.model, &dvae.model, &vae.model, &crecon.model, vae_c ? &vae_c->model : nullptr},
      test, dvae.stats,
      ctx.config.missing_fractions, ctx.config.jobs);
  write_json(ctx.run_dir / "missing_bench.json", result.to_json());
  std::ofstream(ctx.run_dir / "missing_bench.tsv") << result.table();
  say(ctx, result.table());
}

void cmd_report(const RunContext& ctx, const ReportOptions& o) {
  const auto d = synthetic::read_dataset(o.data);
  const auto dvae = load_dvae(o.dvae);
  const auto c = load_classifier(o.c);
  const auto test = normalized_subset(d, test_positions(d, dvae.meta), dvae.stats);
  const auto m = evaluation::compute_metrics(dvae.model, c.model, test, dvae.stats,
                                             ctx.config.jobs);
  const double agreement = evaluation::consistency_check(dvae.model, c.model, test,
                                                         ctx.config.jobs);
  std::vector<Matrix> same, opposite;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto r = evaluation::reconstruct(dvae.model, test.x[i], test.y[i]);
    same.push_back(dvae.stats.invert(r.same));
    opposite.push_back(dvae.stats.invert(r.opposite));
  }
  const auto map = evaluation::local_distance_map(same, opposite);
  mesh::save_scalar_map(ctx.run_dir / "distance_map.ply", d.template_coords, d.faces, map);
  nlohmann::json report = {{"samples", test.size()},
                           {"ca", m.ca},
                           {"osrsr", m.osrsr},
                           {"ssrsr", m.ssrsr},
                           {"re", m.re},
                           {"consistency", 100.0 * agreement}};
  if (!d.region.empty()) report["distance_map_mass_in_region"] =
      evaluation::mass_fraction(map, d.region);
  write_json(ctx.run_dir / "report.json", report);
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << "CA " << m.ca << "% | OSRSR " << m.osrsr
    << "% | SSRSR " << m.ssrsr << "% | RE " << std::setprecision(4) << m.re
    << " | consistency " << std::setprecision(2) << 100.0 * agreement << "%";
  say(ctx, s.str());
}

}  // namespace dvae::app
