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

#include "dvae/synthetic/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "dvae/common/error.hpp"
#include "dvae/mesh/mesh_io.hpp"

namespace dvae::synthetic {

namespace {

std::int64_t midpoint(std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>& cache,
                      std::vector<Eigen::Vector3d>& verts, std::int64_t a,
                      std::int64_t b) {
  const auto key = std::minmax(a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  verts.push_back((verts[a] + verts[b]).normalized());
  const auto id = static_cast<std::int64_t>(verts.size() - 1);
  cache.emplace(key, id);
  return id;
}

Eigen::Vector3d base_shape(const Eigen::Vector3d& u) {
  return {1.2 * u.x() + 0.15 * u.y() * u.y(), 0.95 * u.y(),
          0.8 * u.z() + 0.12 * u.x() * u.x()};
}

Matrix vertex_normals(const Matrix& coords, const std::vector<Triangle>& faces) {
  Matrix n = Matrix::Zero(coords.rows(), 3);
  for (const auto& t : faces) {
    const Eigen::Vector3d a = coords.row(t[0]).transpose();
    const Eigen::Vector3d b = coords.row(t[1]).transpose();
    const Eigen::Vector3d c = coords.row(t[2]).transpose();
    const Eigen::RowVector3d fn = (b - a).cross(c - a).transpose();
    for (auto v : t) n.row(v) += fn;
  }
  const Eigen::RowVector3d centroid = coords.colwise().mean();
  for (Index i = 0; i < n.rows(); ++i) {
    n.row(i).normalize();
    if (n.row(i).dot(coords.row(i) - centroid) < 0.0) n.row(i) *= -1.0;
  }
  return n;
}

const char* kSpecKeys[] = {"subdivisions", "n_subjects", "class_ratio",
                           "scale", "noise_fraction", "nuisance_fraction",
                           "nuisance", "region_radius", "class_rim",
                           "class_peak"};

std::string subject_file(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "subject_%04zu.ply", id);
  return buf;
}

}  // namespace

nlohmann::json PopulationSpec::to_json() const {
  return {{"subdivisions", subdivisions},
          {"n_subjects", n_subjects},
          {"class_ratio", class_ratio},
          {"scale", scale},
          {"noise_fraction", noise_fraction},
          {"nuisance_fraction", nuisance_fraction},
          {"nuisance", nuisance},
          {"region_radius", region_radius},
          {"class_rim", class_rim},
          {"class_peak", class_peak}};
}

PopulationSpec PopulationSpec::from_json(const nlohmann::json& j) {
  DVAE_REQUIRE(j.is_object(), "population spec must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kSpecKeys), std::end(kSpecKeys), key) == std::end(kSpecKeys)) {
      throw ContractViolation("unknown population key '" + key + "'");
    }
  }
  PopulationSpec s;
  s.subdivisions = j.value("subdivisions", s.subdivisions);
  s.n_subjects = j.value("n_subjects", s.n_subjects);
  s.class_ratio = j.value("class_ratio", s.class_ratio);
  s.scale = j.value("scale", s.scale);
  s.noise_fraction = j.value("noise_fraction", s.noise_fraction);
  s.nuisance_fraction = j.value("nuisance_fraction", s.nuisance_fraction);
  s.nuisance = j.value("nuisance", s.nuisance);
  s.region_radius = j.value("region_radius", s.region_radius);
  s.class_rim = j.value("class_rim", s.class_rim);
  s.class_peak = j.value("class_peak", s.class_peak);
  return s;
}

void icosphere(int subdivisions, Matrix& vertices, std::vector<Triangle>& faces) {
  DVAE_REQUIRE(subdivisions >= 0 && subdivisions <= 7, "subdivisions out of range");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> cache;
    std::vector<Triangle> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const auto a = midpoint(cache, verts, f[0], f[1]);
      const auto b = midpoint(cache, verts, f[1], f[2]);
      const auto c = midpoint(cache, verts, f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  vertices.resize(static_cast<Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    vertices.row(static_cast<Index>(i)) = verts[i].transpose();
  }
}

Matrix Population::clean_mesh(const LabeledSample& s) const {
  Matrix m = template_coords;
  for (int k = 0; k < kNuisanceModes; ++k) m += s.nuisance[k] * nuisance_fields[k];
  if (s.label == 1) m += class_field;
  return m;
}

std::vector<bool> Population::region_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(template_coords.rows()), false);
  for (auto i : region) mask[static_cast<std::size_t>(i)] = true;
  return mask;
}

Population generate(const PopulationSpec& spec, std::uint64_t seed) {
  DVAE_REQUIRE(spec.n_subjects >= 1, "population needs at least one subject");
  DVAE_REQUIRE(spec.class_ratio >= 0.0 && spec.class_ratio <= 1.0,
               "class ratio must lie in [0, 1]");
  DVAE_REQUIRE(spec.scale > 0.0 && spec.noise_fraction >= 0.0,
               "scale must be positive and noise non-negative");
  DVAE_REQUIRE(spec.region_radius > 0.0 && spec.region_radius < 1.5,
               "region radius must lie in (0, 1.5) rad");
  DVAE_REQUIRE(spec.class_rim > 0.0 && spec.class_peak >= spec.class_rim,
               "class field needs 0 < rim <= peak");

  Population pop;
  pop.spec = spec;
  pop.seed = seed;
  Matrix unit;
  icosphere(spec.subdivisions, unit, pop.faces);
  const Index n = unit.rows();

  pop.template_coords.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    pop.template_coords.row(i) =
        spec.scale * base_shape(unit.row(i).transpose()).transpose();
  }
  const Matrix normals = vertex_normals(pop.template_coords, pop.faces);

  // Class field: two patches in opposite octants, pushed out and pulled in.
  const double sigma_unit = spec.noise_fraction > 0.0 ? spec.noise_sigma()
                                                      : 0.005 * spec.scale;
  const Eigen::Vector3d c0 = Eigen::Vector3d(0.6, 0.6, 0.5).normalized();
  const std::array<Eigen::Vector3d, 2> centers{c0, -c0};
  const std::array<double, 2> sign{1.0, -1.0};
  pop.class_field = Matrix::Zero(n, 3);
  for (Index i = 0; i < n; ++i) {
    const Eigen::Vector3d u = unit.row(i).transpose();
    for (int p = 0; p < 2; ++p) {
      const double angle = std::acos(std::clamp(u.dot(centers[p]), -1.0, 1.0));
      if (angle >= spec.region_radius) continue;
      const double r = angle / spec.region_radius;
      const double mag =
          sigma_unit * (spec.class_rim + (spec.class_peak - spec.class_rim) * (1.0 - r * r));
      pop.class_field.row(i) = sign[p] * mag * normals.row(i);
      pop.patches[p].push_back(i);
    }
  }
  pop.region = pop.patches[0];
  pop.region.insert(pop.region.end(), pop.patches[1].begin(), pop.patches[1].end());
  std::sort(pop.region.begin(), pop.region.end());

  // Nuisance: stretch along x, stretch along z, bend, twist.
  const double a = spec.nuisance ? spec.nuisance_fraction * spec.scale : 0.0;
  for (auto& f : pop.nuisance_fields) f = Matrix::Zero(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double x = unit(i, 0), y = unit(i, 1), z = unit(i, 2);
    pop.nuisance_fields[0].row(i) << a * x, 0.0, 0.0;
    pop.nuisance_fields[1].row(i) << 0.0, 0.0, a * z;
    pop.nuisance_fields[2].row(i) << 0.0, 0.0, a * (x * x - 1.0 / 3.0);
    pop.nuisance_fields[3].row(i) << 0.0, -a * z * x, a * y * x;
  }

  const auto n1 = static_cast<std::size_t>(
      std::llround(spec.class_ratio * static_cast<double>(spec.n_subjects)));
  std::vector<int> labels(spec.n_subjects, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n1), 1);
  Rng label_rng = substream(seed, {stream::kGenerator, ~std::uint64_t{0}});
  std::shuffle(labels.begin(), labels.end(), label_rng);

  std::normal_distribution<double> n01;
  pop.samples.resize(spec.n_subjects);
  for (std::size_t k = 0; k < spec.n_subjects; ++k) {
    Rng rng = substream(seed, {stream::kGenerator, k});
    LabeledSample& s = pop.samples[k];
    s.id = k;
    s.label = labels[k];
    for (auto& c : s.nuisance) c = n01(rng);
    if (!spec.nuisance) s.nuisance.fill(0.0);
    s.coords = pop.clean_mesh(s);
    const double sigma = spec.noise_sigma();
    for (Index i = 0; i < s.coords.size(); ++i) s.coords.data()[i] += sigma * n01(rng);
  }
  return pop;
}

mesh::SimilarityTransform pre_alignment_perturb(Matrix& coords, Rng& rng) {
  std::normal_distribution<double> n01;
  Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
  q.normalize();
  mesh::SimilarityTransform t;
  t.rotation = q.toRotationMatrix();
  t.scale = std::uniform_real_distribution<double>(0.8, 1.25)(rng);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  for (int d = 0; d < 3; ++d) t.translation(d) = shift(rng);
  coords = t.apply(coords);
  return t;
}

void write_dataset(const std::filesystem::path& dir, const Population& pop) {
  std::filesystem::create_directories(dir);
  mesh::write_mesh(dir / "template.ply", {pop.template_coords, pop.faces, {}});
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : pop.samples) {
    const std::string file = subject_file(s.id);
    mesh::write_mesh(dir / file, {s.coords, pop.faces, {}});
    subjects.push_back({{"id", s.id},
                        {"label", s.label},
                        {"file", file},
                        {"nuisance", s.nuisance}});
  }
  nlohmann::json manifest = {{"seed", pop.seed},
                             {"template", "template.ply"},
                             {"noise_sigma", pop.spec.noise_sigma()},
                             {"population", pop.spec.to_json()},
                             {"subjects", subjects}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  nlohmann::json regions = {{"region", pop.region},
                            {"patches", {pop.patches[0], pop.patches[1]}}};
  std::ofstream(dir / "regions.json") << regions.dump(2) << "\n";
}

Dataset read_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw FormatError("no manifest.json in " + dir.string());
  const auto manifest = nlohmann::json::parse(in);
  Dataset d;
  const auto tmpl = mesh::read_mesh(dir / manifest.at("template").get<std::string>());
  d.template_coords = tmpl.vertices;
  d.faces = tmpl.faces;
  d.noise_sigma = manifest.value("noise_sigma", 0.0);
  for (const auto& s : manifest.at("subjects")) {
    auto m = mesh::read_mesh(dir / s.at("file").get<std::string>());
    if (m.vertices.rows() != d.template_coords.rows()) {
      throw CorrespondenceError(s.at("file").get<std::string>() +
                                ": vertex count differs from the template");
    }
    d.meshes.push_back(std::move(m.vertices));
    d.labels.push_back(s.at("label").get<int>());
    d.ids.push_back(s.at("id").get<std::size_t>());
  }
  std::ifstream rin(dir / "regions.json");
  if (rin) d.region = nlohmann::json::parse(rin).at("region").get<std::vector<std::int64_t>>();
  return d;
}

}  // namespace dvae::synthetic
