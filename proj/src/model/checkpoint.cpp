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

#include "dvae/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "dvae/common/error.hpp"

namespace dvae::model {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'D', 'V', 'A', 'E', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError("truncated checkpoint: " + path.string());
  }
  return v;
}

void put_ints(std::ostream& out, const std::vector<int>& v) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
  for (int x : v) put<std::int32_t>(out, x);
}

std::vector<int> get_ints(std::istream& in, const std::filesystem::path& path) {
  const auto n = get<std::uint32_t>(in, path);
  if (n > 1024) throw FormatError("checkpoint: implausible level count");
  std::vector<int> v(n);
  for (auto& x : v) x = get<std::int32_t>(in, path);
  return v;
}

void put_architecture(std::ostream& out, const Architecture& a) {
  put<std::uint8_t>(out, static_cast<std::uint8_t>(a.kind));
  put<std::int32_t>(out, a.input_channels);
  put<std::int32_t>(out, a.output_channels);
  put<std::int32_t>(out, a.chebyshev_order);
  put<std::int32_t>(out, a.latent);
  put<std::int32_t>(out, a.classes);
  put_ints(out, a.encoder_channels);
  put_ints(out, a.decoder_channels);
  put<std::uint64_t>(out, a.vertex_counts.size());
  for (auto n : a.vertex_counts) put<std::uint64_t>(out, n);
}

Architecture get_architecture(std::istream& in, const std::filesystem::path& path) {
  Architecture a;
  const auto kind = get<std::uint8_t>(in, path);
  if (kind < 1 || kind > 3) throw FormatError("checkpoint: unknown model kind");
  a.kind = static_cast<ModelKind>(kind);
  a.input_channels = get<std::int32_t>(in, path);
  a.output_channels = get<std::int32_t>(in, path);
  a.chebyshev_order = get<std::int32_t>(in, path);
  a.latent = get<std::int32_t>(in, path);
  a.classes = get<std::int32_t>(in, path);
  a.encoder_channels = get_ints(in, path);
  a.decoder_channels = get_ints(in, path);
  const auto n = get<std::uint64_t>(in, path);
  if (n > 1024) throw FormatError("checkpoint: implausible level count");
  a.vertex_counts.resize(n);
  for (auto& v : a.vertex_counts) v = get<std::uint64_t>(in, path);
  return a;
}

std::ifstream open_checked(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError(path.string() + " is not a checkpoint file");
  }
  const int version = in.get();
  if (version != kCheckpointFormatVersion) {
    throw FormatError("checkpoint " + path.string() + " has format version " +
                      std::to_string(version) + "; this build reads version " +
                      std::to_string(kCheckpointFormatVersion));
  }
  return in;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p.replace_extension(".json");
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const MeshModel& model,
                     const nlohmann::json& metadata) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    out.put(static_cast<char>(kCheckpointFormatVersion));
    put_architecture(out, model.architecture());
    put<std::uint64_t>(out, model.parameters().size());
    for (const auto& p : model.parameters()) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
      out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      put<std::uint64_t>(out, static_cast<std::uint64_t>(p.value.rows()));
      put<std::uint64_t>(out, static_cast<std::uint64_t>(p.value.cols()));
      for (ad::Index i = 0; i < p.value.size(); ++i) {
        put<float>(out, static_cast<float>(p.value.data()[i]));
      }
    }
    if (!out) throw FormatError("write failed: " + path.string());
  }
  nlohmann::json meta = metadata;
  meta["format_version"] = kCheckpointFormatVersion;
  meta["model"] = to_string(model.architecture().kind);
  std::ofstream side(sidecar_path(path));
  if (!side) throw FormatError("cannot write " + sidecar_path(path).string());
  side << meta.dump(2) << "\n";
}

Architecture read_checkpoint_architecture(const std::filesystem::path& path) {
  auto in = open_checked(path);
  return get_architecture(in, path);
}

void load_parameters(const std::filesystem::path& path, MeshModel& model) {
  auto in = open_checked(path);
  const Architecture stored = get_architecture(in, path);
  if (!(stored == model.architecture())) {
    throw FormatError("checkpoint " + path.string() +
                      " was saved for a different architecture");
  }
  const auto count = get<std::uint64_t>(in, path);
  if (count != model.parameters().size()) {
    throw FormatError("checkpoint parameter count mismatch");
  }
  for (auto& p : model.parameters()) {
    const auto len = get<std::uint32_t>(in, path);
    if (len > 4096) throw FormatError("checkpoint: implausible parameter name");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError("truncated checkpoint");
    const auto rows = get<std::uint64_t>(in, path);
    const auto cols = get<std::uint64_t>(in, path);
    if (name != p.name || rows != static_cast<std::uint64_t>(p.value.rows()) ||
        cols != static_cast<std::uint64_t>(p.value.cols())) {
      throw FormatError("checkpoint parameter '" + name +
                        "' does not match model parameter '" + p.name + "'");
    }
    for (ad::Index i = 0; i < p.value.size(); ++i) {
      p.value.data()[i] = static_cast<double>(get<float>(in, path));
    }
  }
}

nlohmann::json read_sidecar(const std::filesystem::path& checkpoint) {
  std::ifstream in(sidecar_path(checkpoint));
  if (!in) throw FormatError("missing sidecar " + sidecar_path(checkpoint).string());
  return nlohmann::json::parse(in);
}

}  // namespace dvae::model
