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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "dvae/common/error.hpp"
#include "dvae/mesh/hierarchy.hpp"
#include "dvae/mesh/laplacian.hpp"
#include "dvae/mesh/mesh_io.hpp"
#include "dvae/mesh/normalization.hpp"
#include "dvae/mesh/procrustes.hpp"
#include "support.hpp"

namespace {

using namespace dvae;
using namespace dvae::mesh;
using dvae::testing::icosahedron;
using dvae::testing::random_grid_mesh;
using dvae::testing::random_matrix;
namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dvae_mesh_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

Eigen::MatrixXd dense(const SparseMatrix& s) { return Eigen::MatrixXd(s); }

Eigen::Matrix3d rotation(double angle, Eigen::Vector3d axis) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

// ---- IO -------------------------------------------------------------------

using MeshIo = TempDir;

TEST_F(MeshIo, ParsesASingleTriangle) {
  std::ofstream(dir / "tri.obj") << "# one face\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  const auto m = read_mesh(dir / "tri.obj");
  EXPECT_EQ(m.vertices.rows(), 3);
  ASSERT_EQ(m.faces.size(), 1u);
  EXPECT_EQ(m.faces[0], (Triangle{0, 1, 2}));
  EXPECT_EQ(m.vertices(1, 0), 1.0);
}

TEST_F(MeshIo, ObjFaceTokensWithSlashesAndQuads) {
  std::ofstream(dir / "quad.obj")
      << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
  const auto m = read_mesh(dir / "quad.obj");
  EXPECT_EQ(m.faces.size(), 2u);
}

TEST_F(MeshIo, OutOfRangeFaceIsAParseError) {
  std::ofstream(dir / "bad.obj") << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n";
  EXPECT_THROW(read_mesh(dir / "bad.obj"), ParseError);
  std::ofstream(dir / "bad.ply") << "ply\nformat ascii 1.0\nelement vertex 3\n"
                                    "property float x\nproperty float y\nproperty float z\n"
                                    "element face 1\nproperty list uchar int vertex_indices\n"
                                    "end_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n";
  EXPECT_THROW(read_mesh(dir / "bad.ply"), ParseError);
}

TEST_F(MeshIo, ObjRoundTripKeepsSixDecimals) {
  Rng rng(1);
  const auto ico = icosahedron();
  RawMesh m{random_matrix(12, 3, rng, 10.0), ico.faces, {}};
  write_mesh(dir / "m.obj", m);
  const auto back = read_mesh(dir / "m.obj");
  EXPECT_LE((back.vertices - m.vertices).cwiseAbs().maxCoeff(), 5e-7 + 1e-12);
  EXPECT_EQ(back.faces, m.faces);
}

TEST_F(MeshIo, PlyRoundTripIsExactAndKeepsQuality) {
  Rng rng(2);
  const auto ico = icosahedron();
  RawMesh m{random_matrix(12, 3, rng), ico.faces, std::vector<double>(12)};
  for (int i = 0; i < 12; ++i) m.quality[i] = 0.5 * i;
  write_mesh(dir / "m.ply", m);
  const auto back = read_mesh(dir / "m.ply");
  EXPECT_EQ(back.vertices, m.vertices);
  EXPECT_EQ(back.faces, m.faces);
  EXPECT_EQ(back.quality, m.quality);
}

TEST_F(MeshIo, ReadsAsciiPly) {
  std::ofstream(dir / "a.ply") << "ply\nformat ascii 1.0\nelement vertex 3\n"
                                  "property float x\nproperty float y\nproperty float z\n"
                                  "element face 1\nproperty list uchar int vertex_indices\n"
                                  "end_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
  const auto m = read_mesh(dir / "a.ply");
  EXPECT_EQ(m.vertices.rows(), 3);
  EXPECT_EQ(m.faces.size(), 1u);
}

TEST_F(MeshIo, TruncatedBinaryPlyIsAParseError) {
  const auto ico = icosahedron();
  write_mesh(dir / "m.ply", {ico.coords, ico.faces, {}});
  const auto size = fs::file_size(dir / "m.ply");
  fs::resize_file(dir / "m.ply", size - 7);
  EXPECT_THROW(read_mesh(dir / "m.ply"), ParseError);
}

TEST_F(MeshIo, UnknownExtensionAndMissingFile) {
  EXPECT_THROW(format_from_path("mesh.stl"), FormatError);
  EXPECT_THROW(read_mesh(dir / "absent.ply"), FormatError);
}

TEST_F(MeshIo, LoadMeshChecksCorrespondence) {
  const auto ico = icosahedron();
  auto conn = std::make_shared<const TemplateConnectivity>(12, ico.faces);
  write_mesh(dir / "ico.ply", {ico.coords, ico.faces, {}});
  const auto loaded = load_mesh(dir / "ico.ply", conn);
  EXPECT_EQ(loaded.vertex_count(), 12);
  write_mesh(dir / "tri.ply", {Matrix::Identity(3, 3), {{0, 1, 2}}, {}});
  EXPECT_THROW(load_mesh(dir / "tri.ply", conn), CorrespondenceError);
}

TEST(Connectivity, EdgesAreUniqueAndSorted) {
  const auto ico = icosahedron();
  const TemplateConnectivity conn(12, ico.faces);
  EXPECT_EQ(conn.edges().size(), 30u);
  for (std::size_t i = 0; i < conn.edges().size(); ++i) {
    EXPECT_LT(conn.edges()[i].first, conn.edges()[i].second);
    if (i > 0) {
      EXPECT_LT(conn.edges()[i - 1], conn.edges()[i]);
    }
  }
  EXPECT_THROW(TemplateConnectivity(4, {{0, 1, 2}}), ContractViolation);
  EXPECT_THROW(TemplateConnectivity(3, {{0, 1, 3}}), ContractViolation);
}

TEST(MeanVertexDistance, UnitOffset) {
  Matrix a = Matrix::Zero(5, 3), b = a;
  b.col(2).setConstant(1.0);
  EXPECT_DOUBLE_EQ(mean_vertex_distance(a, b), 1.0);
}

// ---- Laplacian and Chebyshev -------------------------------------------------

TEST(Laplacian, TriangleGraph) {
  const TemplateConnectivity conn(3, {{0, 1, 2}});
  const auto L = dense(normalized_laplacian(conn));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(L(i, j), i == j ? 1.0 : -0.5);
  }
}

TEST(Laplacian, SymmetricWithDegreeWeightedNullVector) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_grid_mesh(3 + trial % 3, 4, rng);
    const TemplateConnectivity conn(static_cast<std::size_t>(m.coords.rows()), m.faces);
    const auto L = dense(normalized_laplacian(conn));
    EXPECT_EQ((L - L.transpose()).cwiseAbs().maxCoeff(), 0.0);
    // the null vector of the normalized Laplacian is D^{1/2} 1
    Eigen::VectorXd d = Eigen::VectorXd::Zero(L.rows());
    for (const auto& [i, j] : conn.edges()) {
      d(i) += 1.0;
      d(j) += 1.0;
    }
    EXPECT_LT((L * d.cwiseSqrt()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Laplacian, RegularGraphAnnihilatesConstants) {
  // every icosahedron vertex has degree 5, so D^{1/2} 1 is a multiple of 1
  const auto ico = icosahedron();
  const auto L = dense(normalized_laplacian(TemplateConnectivity(12, ico.faces)));
  EXPECT_LT((L * Eigen::VectorXd::Ones(12)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Laplacian, RescaledSpectrumLiesInUnitInterval) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const int rows = 2 + trial % 3, cols = 5 + trial % 4;
    const auto m = random_grid_mesh(rows, cols, rng);
    const TemplateConnectivity conn(static_cast<std::size_t>(m.coords.rows()), m.faces);
    const auto L = normalized_laplacian(conn);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> raw(dense(L));
    EXPECT_GE(raw.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LE(raw.eigenvalues().maxCoeff(), 2.0 + 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> scaled(dense(scale_laplacian(L)));
    EXPECT_GE(scaled.eigenvalues().minCoeff(), -1.0 - 1e-12);
    EXPECT_LE(scaled.eigenvalues().maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(Laplacian, IsolatedVertexIsAGeometryError) {
  // vertex 3 only appears in a degenerate face, so it has no edges of its own
  const TemplateConnectivity conn(4, {{0, 1, 2}, {3, 3, 3}});
  EXPECT_THROW(normalized_laplacian(conn), GeometryError);
}

TEST(Chebyshev, FirstTermIsTheInput) {
  Rng rng(5);
  const auto ico = icosahedron();
  const auto Ls = scale_laplacian(normalized_laplacian(TemplateConnectivity(12, ico.faces)));
  const Matrix x = random_matrix(12, 3, rng);
  const auto stack = chebyshev_stack(Ls, x, 1);
  ASSERT_EQ(stack.size(), 1u);
  EXPECT_EQ(stack[0], x);
}

TEST(Chebyshev, ThirdTermFollowsTheRecurrence) {
  Rng rng(6);
  const auto ico = icosahedron();
  const auto Ls = scale_laplacian(normalized_laplacian(TemplateConnectivity(12, ico.faces)));
  const Matrix x = random_matrix(12, 4, rng);
  const auto stack = chebyshev_stack(Ls, x, 3);
  const Eigen::MatrixXd Ld = dense(Ls);
  const Matrix expected = 2.0 * Ld * (Ld * x) - x;
  EXPECT_LT((stack[2] - expected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((stack[1] - Ld * x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Chebyshev, StackIsLinear) {
  Rng rng(7);
  const auto m = random_grid_mesh(4, 4, rng);
  const auto Ls = scale_laplacian(normalized_laplacian(TemplateConnectivity(16, m.faces)));
  const Matrix x = random_matrix(16, 3, rng), y = random_matrix(16, 3, rng);
  const double a = 1.7, b = -0.4;
  const auto sx = chebyshev_stack(Ls, x, 6), sy = chebyshev_stack(Ls, y, 6);
  const auto sxy = chebyshev_stack(Ls, a * x + b * y, 6);
  for (int k = 0; k < 6; ++k) {
    EXPECT_LT((sxy[k] - (a * sx[k] + b * sy[k])).cwiseAbs().maxCoeff(), 1e-10);
  }
}

// ---- hierarchy ----------------------------------------------------------------

TEST(Hierarchy, UnitFactorsGiveIdentityOperators) {
  const auto ico = icosahedron();
  const TemplateConnectivity conn(12, ico.faces);
  const int factors[] = {1, 1};
  const auto h = build_sampling_hierarchy(ico.coords, conn, factors);
  ASSERT_EQ(h.levels(), 2u);
  const auto L0 = dense(h.laplacians[0]);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(h.vertex_counts[l + 1], 12u);
    EXPECT_TRUE(dense(h.down[l]).isIdentity(0.0));
    EXPECT_TRUE(dense(h.up[l]).isIdentity(0.0));
    EXPECT_EQ(dense(h.laplacians[l + 1]), L0);
  }
}

TEST(Hierarchy, OperatorsHaveTheRightStructure) {
  Rng rng(8);
  const auto m = random_grid_mesh(6, 7, rng);
  const TemplateConnectivity conn(42, m.faces);
  const int factors[] = {2, 2, 2};
  const auto h = build_sampling_hierarchy(m.coords, conn, factors);
  ASSERT_EQ(h.vertex_counts, (std::vector<std::size_t>{42, 21, 11, 6}));
  for (std::size_t l = 0; l < h.levels(); ++l) {
    const auto D = dense(h.down[l]);
    const auto U = dense(h.up[l]);
    ASSERT_EQ(D.rows(), static_cast<Index>(h.vertex_counts[l + 1]));
    ASSERT_EQ(D.cols(), static_cast<Index>(h.vertex_counts[l]));
    for (Index r = 0; r < D.rows(); ++r) {
      EXPECT_EQ((D.row(r).array() != 0.0).count(), 1);
      EXPECT_EQ(D.row(r).sum(), 1.0);
    }
    for (Index r = 0; r < U.rows(); ++r) {
      EXPECT_NEAR(U.row(r).sum(), 1.0, 1e-12);
      EXPECT_LE((U.row(r).array() != 0.0).count(), 3);
      EXPECT_GE(U.row(r).minCoeff(), -1e-12);
    }
    // retained vertices map back onto themselves
    EXPECT_TRUE((D * U).isIdentity(1e-12));
    // each coarse level gets a valid rescaled Laplacian
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(h.laplacians[l + 1]));
    EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0 + 1e-12);
    EXPECT_EQ(h.faces[l + 1].empty(), false);
  }
}

TEST(Hierarchy, RefusesDegenerateRequests) {
  const auto ico = icosahedron();
  const TemplateConnectivity conn(12, ico.faces);
  const int zero[] = {0};
  EXPECT_THROW(build_sampling_hierarchy(ico.coords, conn, zero), ContractViolation);
  // 12 -> 4 is allowed, but the 4-vertex level cannot shrink any further
  const int four[] = {4};
  EXPECT_EQ(build_sampling_hierarchy(ico.coords, conn, four).vertex_counts.back(), 4u);
  const int twice[] = {4, 2};
  EXPECT_THROW(build_sampling_hierarchy(ico.coords, conn, twice), GeometryError);
}

TEST(Decimation, KeepsASubsetOfTheRequestedSize) {
  Rng rng(9);
  const auto m = random_grid_mesh(5, 6, rng);
  const auto d = decimate_qem(m.coords, m.faces, 12);
  EXPECT_EQ(d.kept.size(), 12u);
  EXPECT_TRUE(std::is_sorted(d.kept.begin(), d.kept.end()));
  for (const auto& f : d.faces) {
    for (auto v : f) EXPECT_LT(v, 12);
    EXPECT_TRUE(f[0] != f[1] && f[1] != f[2] && f[0] != f[2]);
  }
}

using HierarchyIo = TempDir;

TEST_F(HierarchyIo, RoundTrip) {
  const auto ico = icosahedron();
  const TemplateConnectivity conn(12, ico.faces);
  const int factors[] = {2, 2};
  const auto h = build_sampling_hierarchy(ico.coords, conn, factors);
  save_hierarchy(dir / "h.bin", h);
  const auto back = load_hierarchy(dir / "h.bin");
  EXPECT_EQ(back.vertex_counts, h.vertex_counts);
  EXPECT_EQ(back.faces, h.faces);
  for (std::size_t l = 0; l < h.levels(); ++l) {
    EXPECT_EQ(dense(back.down[l]), dense(h.down[l]));
    EXPECT_EQ(dense(back.up[l]), dense(h.up[l]));
  }
  for (std::size_t l = 0; l <= h.levels(); ++l) {
    EXPECT_EQ(dense(back.laplacians[l]), dense(h.laplacians[l]));
  }
}

TEST_F(HierarchyIo, RejectsForeignFilesAndOtherVersions) {
  std::ofstream(dir / "junk.bin") << "not a hierarchy";
  EXPECT_THROW(load_hierarchy(dir / "junk.bin"), FormatError);
  const auto ico = icosahedron();
  const int factors[] = {2};
  save_hierarchy(dir / "h.bin",
                 build_sampling_hierarchy(ico.coords, TemplateConnectivity(12, ico.faces), factors));
  {
    std::fstream f(dir / "h.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    f.put(static_cast<char>(kHierarchyFormatVersion + 1));
  }
  try {
    load_hierarchy(dir / "h.bin");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

// ---- Procrustes -----------------------------------------------------------------

TEST(Procrustes, IdentityForEqualShapes) {
  Rng rng(10);
  const Matrix p = random_matrix(30, 3, rng);
  const auto a = procrustes_align(p, p);
  EXPECT_NEAR(a.transform.scale, 1.0, 1e-10);
  EXPECT_TRUE(a.transform.rotation.isIdentity(1e-10));
  EXPECT_LT(a.transform.translation.norm(), 1e-10);
  EXPECT_LT(a.residual, 1e-10);
}

TEST(Procrustes, RecoversAKnownTransform) {
  Rng rng(11);
  const Matrix p = random_matrix(40, 3, rng);
  const Eigen::Matrix3d r30 = rotation(std::numbers::pi / 6.0, Eigen::Vector3d::UnitZ());
  // X = 2 R P + (5, 0, 0); aligning X onto P must undo it
  SimilarityTransform t{2.0, r30, Eigen::Vector3d(5, 0, 0)};
  const Matrix x = t.apply(p);
  const auto a = procrustes_align(x, p);
  EXPECT_NEAR(a.transform.scale, 0.5, 1e-10);
  EXPECT_TRUE((a.transform.rotation - r30.transpose()).isZero(1e-10));
  EXPECT_LT(a.residual, 1e-8);
  const auto inv = a.transform.inverse();
  EXPECT_NEAR(inv.scale, 2.0, 1e-10);
  EXPECT_TRUE((inv.rotation - r30).isZero(1e-10));
}

TEST(Procrustes, ExactRecoveryOfRandomSimilarities) {
  Rng rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.2, 5.0), ang(0.0, std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix p = random_matrix(25, 3, rng);
    const SimilarityTransform t{s(rng), rotation(ang(rng), {u(rng), u(rng), u(rng) + 1e-3}),
                                Eigen::Vector3d(u(rng), u(rng), u(rng)) * 20.0};
    const auto a = procrustes_align(t.apply(p), p);
    EXPECT_LT(a.residual, 1e-8);
    EXPECT_NEAR(a.transform.rotation.determinant(), 1.0, 1e-12);
  }
}

TEST(Procrustes, NeverReflects) {
  Rng rng(13);
  const Matrix p = random_matrix(20, 3, rng);
  Matrix mirrored = p;
  mirrored.col(0) *= -1.0;
  const auto a = procrustes_align(mirrored, p);
  EXPECT_NEAR(a.transform.rotation.determinant(), 1.0, 1e-12);
  EXPECT_GT(a.residual, 1e-3);
}

TEST(Procrustes, NoisyResidualStaysSmall) {
  Rng rng(14);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int seed = 0; seed < 100; ++seed) {
    Matrix p = random_matrix(100, 3, rng);
    p.rowwise().normalize();
    Matrix x = p;
    for (Index i = 0; i < x.size(); ++i) x.data()[i] += noise(rng);
    const auto a = procrustes_align(x, p);
    EXPECT_GT(a.residual, 0.0);
    EXPECT_LT(a.residual, 0.02);
  }
}

TEST(Procrustes, ResidualIgnoresAPreappliedSimilarity) {
  Rng rng(15);
  const Matrix p = random_matrix(30, 3, rng);
  const Matrix x = p + random_matrix(30, 3, rng, 0.1);
  const double base = procrustes_align(x, p).residual;
  const SimilarityTransform t{3.5, rotation(1.1, {1, 2, 3}), Eigen::Vector3d(-4, 2, 9)};
  EXPECT_NEAR(procrustes_align(t.apply(x), p).residual, base, 1e-8);
}

TEST(Procrustes, Contracts) {
  const Matrix p = Matrix::Ones(5, 3);
  Rng rng(16);
  EXPECT_THROW(procrustes_align(p, random_matrix(5, 3, rng)), GeometryError);
  EXPECT_THROW(procrustes_align(random_matrix(4, 3, rng), random_matrix(5, 3, rng)),
               ContractViolation);
}

// ---- normalization ---------------------------------------------------------------

TEST(Normalization, ApplyInvertRoundTrip) {
  Rng rng(17);
  std::vector<Matrix> train;
  for (int i = 0; i < 10; ++i) train.push_back(random_matrix(8, 3, rng, 4.0));
  const auto stats = NormalizationStats::fit(train);
  const Matrix x = random_matrix(8, 3, rng, 4.0);
  EXPECT_LT((stats.invert(stats.apply(x)) - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Normalization, TrainingMeanBecomesZero) {
  Rng rng(18);
  std::vector<Matrix> train;
  for (int i = 0; i < 15; ++i) train.push_back(random_matrix(6, 3, rng, 3.0).array() + 7.0);
  const auto stats = NormalizationStats::fit(train);
  Matrix total = Matrix::Zero(6, 3);
  for (const auto& m : train) total += stats.apply(m);
  EXPECT_LT((total / 15.0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Normalization, ConstantCoordinateNormalizesToZero) {
  Rng rng(19);
  std::vector<Matrix> train;
  for (int i = 0; i < 5; ++i) {
    Matrix m = random_matrix(4, 3, rng);
    m(2, 1) = 3.25;
    train.push_back(m);
  }
  const auto stats = NormalizationStats::fit(train);
  EXPECT_EQ(stats.stddev()(2, 1), NormalizationStats::kStdFloor);
  for (const auto& m : train) EXPECT_EQ(stats.apply(m)(2, 1), 0.0);
}

TEST(Normalization, JsonRoundTripAndContracts) {
  Rng rng(20);
  std::vector<Matrix> train{random_matrix(3, 3, rng), random_matrix(3, 3, rng)};
  const auto stats = NormalizationStats::fit(train);
  const auto back = NormalizationStats::from_json(stats.to_json());
  EXPECT_EQ(back.mean(), stats.mean());
  EXPECT_EQ(back.stddev(), stats.stddev());
  EXPECT_THROW(NormalizationStats::fit(std::vector<Matrix>{}), ContractViolation);
  train.push_back(random_matrix(4, 3, rng));
  EXPECT_THROW(NormalizationStats::fit(train), ContractViolation);
}

}  // namespace
