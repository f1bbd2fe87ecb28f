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

#include "dvae/mesh/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "dvae/common/error.hpp"

namespace dvae::mesh {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

void validate_faces(const RawMesh& m, const std::vector<std::size_t>& where) {
  const auto n = static_cast<std::int64_t>(m.vertices.rows());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    for (auto v : m.faces[f]) {
      if (v < 0 || v >= n) {
        throw ParseError("face references vertex " + std::to_string(v) +
                             " but the mesh has " + std::to_string(n),
                         where[f]);
      }
    }
  }
}

// ---- OBJ -------------------------------------------------------------------

std::int64_t obj_index(const std::string& token, std::size_t line,
                       std::int64_t vertex_count) {
  const std::string head = token.substr(0, token.find('/'));
  std::int64_t idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoll(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw ParseError("bad face index '" + token + "'", line);
  }
  if (idx == 0) throw ParseError("face index 0 is invalid in OBJ", line);
  return idx > 0 ? idx - 1 : vertex_count + idx;
}

RawMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<double> xyz;
  RawMesh mesh;
  std::vector<std::size_t> face_lines;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream ss(text);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw ParseError("malformed vertex", line);
      xyz.insert(xyz.end(), {x, y, z});
    } else if (tag == "f") {
      std::vector<std::int64_t> idx;
      std::string tok;
      const auto nv = static_cast<std::int64_t>(xyz.size() / 3);
      while (ss >> tok) idx.push_back(obj_index(tok, line, nv));
      if (idx.size() < 3) throw ParseError("face with fewer than 3 vertices", line);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        face_lines.push_back(line);
      }
    }
  }
  mesh.vertices =
      Eigen::Map<const Matrix>(xyz.data(), static_cast<Index>(xyz.size() / 3), 3);
  validate_faces(mesh, face_lines);
  return mesh;
}

void write_obj(const std::filesystem::path& path, const RawMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << std::fixed << std::setprecision(6);
  for (Index i = 0; i < mesh.vertices.rows(); ++i) {
    out << "v " << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' '
        << mesh.vertices(i, 2) << '\n';
  }
  for (const auto& t : mesh.faces) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

// ---- PLY -------------------------------------------------------------------

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

const std::map<std::string, PlyType>& ply_types() {
  static const std::map<std::string, PlyType> types = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUint8},   {"uint8", PlyType::kUint8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUint16}, {"uint16", PlyType::kUint16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUint32},   {"uint32", PlyType::kUint32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64}};
  return types;
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8: return 1;
    case PlyType::kInt16:
    case PlyType::kUint16: return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

class PlyReader {
 public:
  PlyReader(std::istream& in, bool binary, std::size_t first_line)
      : in_(in), binary_(binary), line_(first_line) {}

  double scalar(PlyType t, const std::string& what) {
    if (!binary_) return ascii_token(what);
    char buf[8];
    if (!in_.read(buf, type_size(t))) throw ParseError("truncated " + what, line_);
    switch (t) {
      case PlyType::kInt8: return load<std::int8_t>(buf);
      case PlyType::kUint8: return load<std::uint8_t>(buf);
      case PlyType::kInt16: return load<std::int16_t>(buf);
      case PlyType::kUint16: return load<std::uint16_t>(buf);
      case PlyType::kInt32: return load<std::int32_t>(buf);
      case PlyType::kUint32: return load<std::uint32_t>(buf);
      case PlyType::kFloat32: return load<float>(buf);
      case PlyType::kFloat64: return load<double>(buf);
    }
    return 0.0;
  }

  void next_record() {
    ++record_;
    if (!binary_) {
      if (!pending_.eof()) {
        std::string rest;
        if (pending_ >> rest) throw ParseError("trailing data in record", line_);
      }
      pending_.clear();
      pending_.str("");
      have_line_ = false;
    }
  }

  std::size_t location() const { return binary_ ? record_ : line_; }

 private:
  double ascii_token(const std::string& what) {
    if (!have_line_) {
      std::string text;
      if (!std::getline(in_, text)) throw ParseError("truncated " + what, line_);
      ++line_;
      pending_.clear();
      pending_.str(text);
      have_line_ = true;
    }
    double v;
    if (!(pending_ >> v)) throw ParseError("malformed " + what, line_);
    return v;
  }

  std::istream& in_;
  bool binary_;
  std::size_t line_;
  std::size_t record_ = 0;
  std::istringstream pending_;
  bool have_line_ = false;
};

RawMesh read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string text;
  std::size_t line = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, text)) return false;
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return true;
  };
  if (!next_line() || text != "ply") throw ParseError("missing 'ply' magic", 1);
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  while (true) {
    if (!next_line()) throw ParseError("unterminated header", line);
    std::istringstream ss(text);
    std::string tag;
    ss >> tag;
    if (tag == "end_header") break;
    if (tag == "comment" || tag == "obj_info" || tag.empty()) continue;
    if (tag == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt != "ascii") {
        throw ParseError("unsupported PLY format '" + fmt + "'", line);
      }
      have_format = true;
    } else if (tag == "element") {
      PlyElement e;
      if (!(ss >> e.name >> e.count)) throw ParseError("malformed element", line);
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw ParseError("property before element", line);
      PlyProperty p;
      std::string type;
      ss >> type;
      const auto& types = ply_types();
      if (type == "list") {
        std::string ct, it;
        ss >> ct >> it >> p.name;
        if (!types.count(ct) || !types.count(it)) {
          throw ParseError("unknown list type", line);
        }
        p.is_list = true;
        p.count_type = types.at(ct);
        p.type = types.at(it);
      } else {
        if (!types.count(type)) throw ParseError("unknown type '" + type + "'", line);
        p.type = types.at(type);
        ss >> p.name;
      }
      if (p.name.empty()) throw ParseError("property without a name", line);
      elements.back().properties.push_back(p);
    } else {
      throw ParseError("unexpected header keyword '" + tag + "'", line);
    }
  }
  if (!have_format) throw ParseError("missing format line", line);

  RawMesh mesh;
  std::vector<std::size_t> face_where;
  PlyReader reader(in, binary, line);
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      mesh.vertices.resize(static_cast<Index>(e.count), 3);
      bool has_quality = false;
      for (const auto& p : e.properties) has_quality |= p.name == "quality";
      if (has_quality) mesh.quality.resize(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.scalar(p.count_type, "list count"));
            for (std::size_t k = 0; k < n; ++k) reader.scalar(p.type, "list entry");
            continue;
          }
          const double v = reader.scalar(p.type, "vertex property");
          if (p.name == "x") mesh.vertices(i, 0) = v;
          else if (p.name == "y") mesh.vertices(i, 1) = v;
          else if (p.name == "z") mesh.vertices(i, 2) = v;
          else if (p.name == "quality") mesh.quality[i] = v;
        }
        reader.next_record();
      }
    } else if (e.name == "face") {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (!p.is_list) {
            reader.scalar(p.type, "face property");
            continue;
          }
          const auto n = static_cast<std::int64_t>(reader.scalar(p.count_type, "face count"));
          std::vector<std::int64_t> idx(std::max<std::int64_t>(n, 0));
          for (auto& v : idx) v = static_cast<std::int64_t>(reader.scalar(p.type, "face index"));
          if (p.name != "vertex_indices" && p.name != "vertex_index") continue;
          if (n < 3) throw ParseError("face with fewer than 3 vertices", reader.location());
          for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
            mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
            face_where.push_back(reader.location());
          }
        }
        reader.next_record();
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          const std::size_t n =
              p.is_list ? static_cast<std::size_t>(reader.scalar(p.count_type, "list count")) : 1;
          for (std::size_t k = 0; k < n; ++k) reader.scalar(p.type, "property");
        }
        reader.next_record();
      }
    }
  }
  validate_faces(mesh, face_where);
  return mesh;
}

template <typename T>
void store(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

void write_ply(const std::filesystem::path& path, const RawMesh& mesh) {
  const bool quality = !mesh.quality.empty();
  DVAE_REQUIRE(!quality || mesh.quality.size() ==
                               static_cast<std::size_t>(mesh.vertices.rows()),
               "write_ply: quality length differs from vertex count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.rows() << '\n'
      << "property double x\nproperty double y\nproperty double z\n";
  if (quality) out << "property double quality\n";
  out << "element face " << mesh.faces.size() << '\n'
      << "property list uchar int vertex_indices\nend_header\n";
  for (Index i = 0; i < mesh.vertices.rows(); ++i) {
    for (int c = 0; c < 3; ++c) store<double>(out, mesh.vertices(i, c));
    if (quality) store<double>(out, mesh.quality[i]);
  }
  for (const auto& t : mesh.faces) {
    store<std::uint8_t>(out, 3);
    for (auto v : t) store<std::int32_t>(out, static_cast<std::int32_t>(v));
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return MeshFormat::kObj;
  if (ext == ".ply") return MeshFormat::kPly;
  throw FormatError("unknown mesh extension '" + ext + "' (expected .obj or .ply)");
}

RawMesh read_mesh(const std::filesystem::path& path) {
  return read_mesh(path, format_from_path(path));
}

RawMesh read_mesh(const std::filesystem::path& path, MeshFormat format) {
  return format == MeshFormat::kObj ? read_obj(path) : read_ply(path);
}

void write_mesh(const std::filesystem::path& path, const RawMesh& mesh,
                MeshFormat format) {
  DVAE_REQUIRE(mesh.vertices.cols() == 3, "write_mesh: vertices must be N x 3");
  if (format == MeshFormat::kObj) {
    write_obj(path, mesh);
  } else {
    write_ply(path, mesh);
  }
}

void write_mesh(const std::filesystem::path& path, const RawMesh& mesh) {
  write_mesh(path, mesh, format_from_path(path));
}

CorrespondedMesh load_mesh(const std::filesystem::path& path,
                           const ConnectivityPtr& tmpl) {
  RawMesh raw = read_mesh(path);
  if (tmpl && static_cast<std::size_t>(raw.vertices.rows()) != tmpl->vertex_count()) {
    throw CorrespondenceError(path.string() + " has " +
                              std::to_string(raw.vertices.rows()) +
                              " vertices, template has " +
                              std::to_string(tmpl->vertex_count()));
  }
  CorrespondedMesh m;
  m.coords = std::move(raw.vertices);
  m.connectivity = tmpl;
  return m;
}

void save_mesh(const std::filesystem::path& path, const CorrespondedMesh& mesh,
               std::optional<MeshFormat> format) {
  RawMesh raw;
  raw.vertices = mesh.coords;
  if (mesh.connectivity) raw.faces = mesh.connectivity->triangles();
  write_mesh(path, raw, format ? *format : format_from_path(path));
}

void save_scalar_map(const std::filesystem::path& path, const Matrix& coords,
                     const std::vector<Triangle>& faces,
                     const std::vector<double>& values) {
  RawMesh raw{coords, faces, values};
  write_mesh(path, raw, MeshFormat::kPly);
}

}  // namespace dvae::mesh
