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

#include "dvae/mesh/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "dvae/common/error.hpp"
#include "dvae/mesh/laplacian.hpp"

namespace dvae::mesh {
namespace {

using Vec3 = Eigen::Vector3d;
using Quadric = Eigen::Matrix4d;

Vec3 row3(const Matrix& m, std::int64_t i) {
  return Vec3(m(i, 0), m(i, 1), m(i, 2));
}

struct Candidate {
  double cost;
  std::int64_t from;
  std::int64_t to;
  std::uint64_t stamp_from;
  std::uint64_t stamp_to;

  bool operator>(const Candidate& o) const {
    return std::tie(cost, from, to) > std::tie(o.cost, o.from, o.to);
  }
};

class Decimator {
 public:
  Decimator(const Matrix& coords, const std::vector<Triangle>& faces)
      : coords_(coords),
        faces_(faces),
        face_alive_(faces.size(), true),
        vertex_faces_(coords.rows()),
        quadrics_(coords.rows(), Quadric::Zero()),
        alive_(coords.rows(), true),
        stamp_(coords.rows(), 0),
        alive_count_(static_cast<std::size_t>(coords.rows())) {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const auto& t = faces_[f];
      Vec3 n = (row3(coords_, t[1]) - row3(coords_, t[0]))
                   .cross(row3(coords_, t[2]) - row3(coords_, t[0]));
      for (auto v : t) vertex_faces_[v].push_back(f);
      if (n.norm() == 0.0) continue;
      n.normalize();
      Eigen::Vector4d plane(n.x(), n.y(), n.z(), -n.dot(row3(coords_, t[0])));
      const Quadric k = plane * plane.transpose();
      for (auto v : t) quadrics_[v] += k;
    }
  }

  Decimation run(std::size_t target) {
    bool rebuilt = false;
    seed_queue();
    while (alive_count_ > target) {
      if (queue_.empty()) {
        if (rebuilt) {
          throw GeometryError("decimate_qem: no valid collapse left at " +
                              std::to_string(alive_count_) + " vertices");
        }
        rebuilt = true;
        seed_queue();
        continue;
      }
      Candidate c = queue_.top();
      queue_.pop();
      if (!alive_[c.from] || !alive_[c.to] || stamp_[c.from] != c.stamp_from ||
          stamp_[c.to] != c.stamp_to) {
        continue;
      }
      if (!can_collapse(c.from, c.to)) continue;
      collapse(c.from, c.to);
      rebuilt = false;
    }
    return result();
  }

 private:
  std::vector<std::int64_t> neighbors(std::int64_t v) const {
    std::vector<std::int64_t> out;
    for (auto f : vertex_faces_[v]) {
      if (!face_alive_[f]) continue;
      for (auto w : faces_[f]) {
        if (w != v) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::size_t live_face_count(std::int64_t v) const {
    std::size_t n = 0;
    for (auto f : vertex_faces_[v]) n += face_alive_[f] ? 1 : 0;
    return n;
  }

  /// True if some edge at v borders exactly one live face.
  bool on_boundary(std::int64_t v) const {
    for (auto w : neighbors(v)) {
      std::size_t n = 0;
      for (auto f : vertex_faces_[v]) {
        if (!face_alive_[f]) continue;
        const auto& t = faces_[f];
        if (std::find(t.begin(), t.end(), w) != t.end()) ++n;
      }
      if (n == 1) return true;
    }
    return false;
  }

  double cost(std::int64_t from, std::int64_t to) const {
    const Quadric q = quadrics_[from] + quadrics_[to];
    const Vec3 p = row3(coords_, to);
    const Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
    return std::max(0.0, h.dot(q * h));
  }

  void push_edge(std::int64_t a, std::int64_t b) {
    const double ab = cost(a, b);
    const double ba = cost(b, a);
    if (ab <= ba) {
      queue_.push({ab, a, b, stamp_[a], stamp_[b]});
    } else {
      queue_.push({ba, b, a, stamp_[b], stamp_[a]});
    }
  }

  void seed_queue() {
    queue_ = {};
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(alive_.size()); ++v) {
      if (!alive_[v]) continue;
      for (auto w : neighbors(v)) {
        if (v < w) push_edge(v, w);
      }
    }
  }

  bool can_collapse(std::int64_t from, std::int64_t to) const {
    const auto nf = neighbors(from);
    const auto nt = neighbors(to);
    if (!std::binary_search(nf.begin(), nf.end(), to)) return false;

    // Link condition: the endpoints may only share the apexes of the faces
    // incident to the edge, otherwise the collapse pinches the surface.
    std::vector<std::int64_t> common;
    std::set_intersection(nf.begin(), nf.end(), nt.begin(), nt.end(),
                          std::back_inserter(common));
    std::size_t shared_faces = 0;
    for (auto f : vertex_faces_[from]) {
      if (!face_alive_[f]) continue;
      const auto& t = faces_[f];
      if (std::find(t.begin(), t.end(), to) != t.end()) ++shared_faces;
    }
    if (common.size() != shared_faces) return false;

    // An apex whose only face is removed by the collapse would be orphaned.
    for (auto f : vertex_faces_[from]) {
      if (!face_alive_[f]) continue;
      const auto& t = faces_[f];
      if (std::find(t.begin(), t.end(), to) == t.end()) continue;
      for (auto w : t) {
        if (w != from && w != to && live_face_count(w) < 2) return false;
      }
    }

    // An interior edge between two boundary vertices would pinch the mesh.
    if (shared_faces == 2 && on_boundary(from) && on_boundary(to)) return false;

    // Reject fold-overs of the faces that move with `from`.
    const Vec3 target = row3(coords_, to);
    for (auto f : vertex_faces_[from]) {
      if (!face_alive_[f]) continue;
      const auto& t = faces_[f];
      if (std::find(t.begin(), t.end(), to) != t.end()) continue;
      Vec3 p[3], q[3];
      for (int k = 0; k < 3; ++k) {
        p[k] = row3(coords_, t[k]);
        q[k] = t[k] == from ? target : p[k];
      }
      const Vec3 n0 = (p[1] - p[0]).cross(p[2] - p[0]);
      const Vec3 n1 = (q[1] - q[0]).cross(q[2] - q[0]);
      if (n1.norm() <= 1e-14 * std::max(1.0, n0.norm())) return false;
      if (n0.dot(n1) <= 0.0) return false;
    }
    return true;
  }

  void collapse(std::int64_t from, std::int64_t to) {
    for (auto f : vertex_faces_[from]) {
      if (!face_alive_[f]) continue;
      auto& t = faces_[f];
      if (std::find(t.begin(), t.end(), to) != t.end()) {
        face_alive_[f] = false;
        continue;
      }
      for (auto& v : t) {
        if (v == from) v = to;
      }
      vertex_faces_[to].push_back(f);
    }
    vertex_faces_[from].clear();
    quadrics_[to] += quadrics_[from];
    alive_[from] = false;
    --alive_count_;
    ++stamp_[from];
    ++stamp_[to];
    auto& own = vertex_faces_[to];
    own.erase(std::remove_if(own.begin(), own.end(),
                             [&](std::size_t f) { return !face_alive_[f]; }),
              own.end());
    for (auto w : neighbors(to)) push_edge(to, w);
  }

  Decimation result() const {
    Decimation d;
    std::vector<std::int64_t> remap(alive_.size(), -1);
    for (std::size_t v = 0; v < alive_.size(); ++v) {
      if (!alive_[v]) continue;
      remap[v] = static_cast<std::int64_t>(d.kept.size());
      d.kept.push_back(static_cast<std::int64_t>(v));
    }
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!face_alive_[f]) continue;
      const auto& t = faces_[f];
      d.faces.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    }
    return d;
  }

  const Matrix& coords_;
  std::vector<Triangle> faces_;
  std::vector<bool> face_alive_;
  std::vector<std::vector<std::size_t>> vertex_faces_;
  std::vector<Quadric> quadrics_;
  std::vector<bool> alive_;
  std::vector<std::uint64_t> stamp_;
  std::size_t alive_count_;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue_;
};

// Barycentric coordinates of the point of triangle abc closest to p.
Vec3 closest_barycentric(const Vec3& p, const Vec3& a, const Vec3& b,
                         const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return {1, 0, 0};
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return {0, 1, 0};
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double v = d1 / (d1 - d3);
    return {1 - v, v, 0};
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return {0, 0, 1};
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double w = d2 / (d2 - d6);
    return {1 - w, 0, w};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0, 1 - w, w};
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {1 - v - w, v, w};
}

SparseMatrix selection_matrix(const std::vector<std::int64_t>& kept,
                              Index fine_count) {
  SparseMatrix d(static_cast<Index>(kept.size()), fine_count);
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    t.emplace_back(static_cast<Index>(i), kept[i], 1.0);
  }
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

SparseMatrix upsampling_matrix(const Matrix& fine_coords,
                               const Decimation& dec) {
  const Index n = fine_coords.rows();
  std::vector<std::int64_t> remap(n, -1);
  for (std::size_t i = 0; i < dec.kept.size(); ++i) remap[dec.kept[i]] = i;
  std::vector<Eigen::Triplet<double>> t;
  for (Index v = 0; v < n; ++v) {
    if (remap[v] >= 0) {
      t.emplace_back(v, remap[v], 1.0);
      continue;
    }
    const Vec3 p = row3(fine_coords, v);
    double best = std::numeric_limits<double>::infinity();
    const Triangle* best_face = nullptr;
    Vec3 best_bary;
    for (const auto& f : dec.faces) {
      const Vec3 a = row3(fine_coords, dec.kept[f[0]]);
      const Vec3 b = row3(fine_coords, dec.kept[f[1]]);
      const Vec3 c = row3(fine_coords, dec.kept[f[2]]);
      const Vec3 w = closest_barycentric(p, a, b, c);
      const double dist = (w[0] * a + w[1] * b + w[2] * c - p).squaredNorm();
      if (dist < best) {
        best = dist;
        best_face = &f;
        best_bary = w;
      }
    }
    for (int k = 0; k < 3; ++k) {
      if (best_bary[k] != 0.0) t.emplace_back(v, (*best_face)[k], best_bary[k]);
    }
  }
  SparseMatrix u(n, static_cast<Index>(dec.kept.size()));
  u.setFromTriplets(t.begin(), t.end());
  return u;
}

// ---- binary cache ----------------------------------------------------------

constexpr char kMagic[8] = {'D', 'V', 'A', 'E', 'H', 'I', 'E', 'R'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw FormatError("hierarchy file truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_sparse(std::ostream& out, const SparseMatrix& m) {
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  put_u64(out, m.nonZeros());
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      put_u64(out, it.row());
      put_u64(out, it.col());
      put_f64(out, it.value());
    }
  }
}

SparseMatrix get_sparse(std::istream& in) {
  const auto rows = get_u64(in), cols = get_u64(in), nnz = get_u64(in);
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (rows > kLimit || cols > kLimit || nnz > rows * cols) {
    throw FormatError("hierarchy file: implausible matrix header");
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto r = get_u64(in), c = get_u64(in);
    const double v = get_f64(in);
    if (r >= rows || c >= cols) throw FormatError("hierarchy file: index out of range");
    t.emplace_back(static_cast<Index>(r), static_cast<Index>(c), v);
  }
  SparseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

Decimation decimate_qem(const Matrix& coords, const std::vector<Triangle>& faces,
                        std::size_t target_vertices) {
  DVAE_REQUIRE(coords.cols() == 3, "decimate_qem: coordinates must be N x 3");
  if (target_vertices >= static_cast<std::size_t>(coords.rows())) {
    Decimation d;
    for (Index i = 0; i < coords.rows(); ++i) d.kept.push_back(i);
    d.faces = faces;
    return d;
  }
  return Decimator(coords, faces).run(target_vertices);
}

SamplingHierarchy build_sampling_hierarchy(const Matrix& template_coords,
                                           const TemplateConnectivity& conn,
                                           std::span<const int> factors) {
  DVAE_REQUIRE(template_coords.rows() ==
                   static_cast<Index>(conn.vertex_count()),
               "build_sampling_hierarchy: coordinates do not match template");
  for (int f : factors) {
    DVAE_REQUIRE(f >= 1, "build_sampling_hierarchy: factors must be >= 1");
  }
  SamplingHierarchy h;
  Matrix coords = template_coords;
  std::vector<Triangle> faces = conn.triangles();
  h.vertex_counts.push_back(conn.vertex_count());
  h.laplacians.push_back(scale_laplacian(normalized_laplacian(conn)));
  h.faces.push_back(faces);

  for (int factor : factors) {
    const std::size_t n = static_cast<std::size_t>(coords.rows());
    std::size_t target = n;
    if (factor > 1) {
      target = std::max<std::size_t>(4, (n + factor - 1) / factor);
      if (target >= n) {
        throw GeometryError("build_sampling_hierarchy: cannot decimate " +
                            std::to_string(n) + " vertices below the 4-vertex floor");
      }
    }
    const Decimation dec = decimate_qem(coords, faces, target);
    h.down.push_back(selection_matrix(dec.kept, coords.rows()));
    h.up.push_back(factor > 1 ? upsampling_matrix(coords, dec)
                              : selection_matrix(dec.kept, coords.rows())
                                    .transpose());
    Matrix next(static_cast<Index>(dec.kept.size()), 3);
    for (std::size_t i = 0; i < dec.kept.size(); ++i) {
      next.row(i) = coords.row(dec.kept[i]);
    }
    coords = std::move(next);
    faces = dec.faces;
    const TemplateConnectivity coarse(dec.kept.size(), faces);
    h.vertex_counts.push_back(dec.kept.size());
    h.laplacians.push_back(scale_laplacian(normalized_laplacian(coarse)));
    h.faces.push_back(faces);
  }
  return h;
}

void save_hierarchy(const std::filesystem::path& path,
                    const SamplingHierarchy& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  out.put(static_cast<char>(kHierarchyFormatVersion));
  put_u64(out, h.vertex_counts.size());
  for (auto n : h.vertex_counts) put_u64(out, n);
  for (const auto& l : h.laplacians) put_sparse(out, l);
  for (std::size_t i = 0; i < h.levels(); ++i) {
    put_sparse(out, h.down[i]);
    put_sparse(out, h.up[i]);
  }
  for (const auto& faces : h.faces) {
    put_u64(out, faces.size());
    for (const auto& t : faces) {
      for (auto v : t) put_u64(out, static_cast<std::uint64_t>(v));
    }
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

SamplingHierarchy load_hierarchy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError(path.string() + " is not a hierarchy file");
  }
  const int version = in.get();
  if (version != kHierarchyFormatVersion) {
    throw FormatError("hierarchy format version " + std::to_string(version) +
                      " unsupported (expected " +
                      std::to_string(kHierarchyFormatVersion) + ")");
  }
  SamplingHierarchy h;
  const auto levels = get_u64(in);
  if (levels == 0 || levels > 64) throw FormatError("hierarchy: bad level count");
  for (std::uint64_t i = 0; i < levels; ++i) h.vertex_counts.push_back(get_u64(in));
  for (std::uint64_t i = 0; i < levels; ++i) h.laplacians.push_back(get_sparse(in));
  for (std::uint64_t i = 0; i + 1 < levels; ++i) {
    h.down.push_back(get_sparse(in));
    h.up.push_back(get_sparse(in));
  }
  for (std::uint64_t i = 0; i < levels; ++i) {
    const auto nf = get_u64(in);
    if (nf > (std::uint64_t{1} << 32)) throw FormatError("hierarchy: bad face count");
    std::vector<Triangle> faces(nf);
    for (auto& t : faces) {
      for (auto& v : t) v = static_cast<std::int64_t>(get_u64(in));
    }
    h.faces.push_back(std::move(faces));
  }
  return h;
}

}  // namespace dvae::mesh
