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

#include <cstring>
#include <filesystem>
#include <fstream>

#include "dvae/ad/gradcheck.hpp"
#include "dvae/ad/ops.hpp"
#include "dvae/common/error.hpp"
#include "dvae/model/checkpoint.hpp"
#include "dvae/model/layers.hpp"
#include "dvae/model/models.hpp"
#include "support.hpp"

namespace {

using namespace dvae;
using namespace dvae::model;
using ad::GradMode;
using dvae::testing::max_relative_error;
using dvae::testing::numeric_gradient;
using dvae::testing::random_matrix;
using dvae::testing::toy_hierarchy;
namespace fs = std::filesystem;

void zero_parameters(ParameterSet& params, const std::string& prefix) {
  for (auto& p : params) {
    if (p.name.rfind(prefix, 0) == 0) p.value.setZero();
  }
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

class ToyModels : public ::testing::Test {
 protected:
  HierarchyPtr h = toy_hierarchy();
  Rng rng{123};
  Matrix x() { return random_matrix(12, 3, rng); }
};

TEST(Labels, OneHotAndBack) {
  EXPECT_EQ(one_hot(0), (Matrix(1, 2) << 1, 0).finished());
  EXPECT_EQ(one_hot(1), (Matrix(1, 2) << 0, 1).finished());
  EXPECT_EQ(label_of(one_hot(1)), 1);
  EXPECT_THROW(one_hot(2), ContractViolation);
  EXPECT_THROW(label_of((Matrix(1, 2) << 0.5, 0.5).finished()), ContractViolation);
  EXPECT_THROW(label_of((Matrix(1, 2) << 1, 1).finished()), ContractViolation);
}

TEST(Labels, TiesResolveToClassZero) {
  EXPECT_EQ(argmax_label((Matrix(1, 2) << 0.5, 0.5).finished()), 0);
  EXPECT_EQ(argmax_label((Matrix(1, 2) << 0.2, 0.8).finished()), 1);
}

TEST_F(ToyModels, LabelProbabilitiesAreADistribution) {
  DvaeModel m(dvae_architecture(*h), h, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix p = m.encode_label(random_matrix(12, 3, rng, 1.0 + 10.0 * trial));
    EXPECT_NEAR(p.sum(), 1.0, 1e-6);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST_F(ToyModels, ZeroLogitsGiveEvenOddsAndClassZero) {
  DvaeModel m(dvae_architecture(*h), h, 2);
  zero_parameters(m.parameters(), "q0.");
  const Matrix p = m.encode_label(x());
  EXPECT_EQ(p(0, 0), 0.5);
  EXPECT_EQ(p(0, 1), 0.5);
  EXPECT_EQ(argmax_label(p), 0);
}

TEST_F(ToyModels, InferenceIsDeterministic) {
  DvaeModel m(dvae_architecture(*h), h, 3);
  const Matrix a = x();
  EXPECT_TRUE(bit_equal(m.encode_label(a), m.encode_label(a)));
  const auto c1 = m.encode_latent(a, one_hot(1));
  const auto c2 = m.encode_latent(a, one_hot(1));
  EXPECT_TRUE(bit_equal(c1.mu, c2.mu));
  EXPECT_TRUE(bit_equal(c1.logvar, c2.logvar));
  const Matrix z = random_matrix(1, 16, rng);
  EXPECT_TRUE(bit_equal(m.decode(z, one_hot(0)), m.decode(z, one_hot(0))));
  const DvaeModel twin(dvae_architecture(*h), h, 3);
  EXPECT_TRUE(bit_equal(twin.decode(z, one_hot(0)), m.decode(z, one_hot(0))));
}

TEST_F(ToyModels, LabelPathwayOfTheDecoderIsLive) {
  DvaeModel m(dvae_architecture(*h), h, 4);
  const Matrix z = random_matrix(1, 16, rng);
  EXPECT_GT((m.decode(z, one_hot(0)) - m.decode(z, one_hot(1))).norm(), 1e-6);
  // the y entries of the decoder input carry a non-zero gradient
  ad::Tape t;
  ad::Var y = t.input(one_hot(0));
  ad::Var out = m.decode(t, t.constant(z), y);
  t.backward(ad::sum_squares(out));
  EXPECT_GT(t.grad(y).cwiseAbs().maxCoeff(), 1e-8);
}

TEST_F(ToyModels, LatentHeadsSeeTheLabel) {
  DvaeModel m(dvae_architecture(*h), h, 5);
  const Matrix a = x();
  EXPECT_NE(m.encode_latent(a, one_hot(0)).mu, m.encode_latent(a, one_hot(1)).mu);
}

TEST_F(ToyModels, DifferentSeedsGiveDifferentWeights) {
  DvaeModel a(dvae_architecture(*h), h, 6), b(dvae_architecture(*h), h, 7);
  EXPECT_NE(a.parameters()[ad::ParamId{0}].value, b.parameters()[ad::ParamId{0}].value);
}

TEST_F(ToyModels, ParameterCountMatchesTheArchitecture) {
  const Architecture arch = dvae_architecture(*h);
  const DvaeModel m(arch, h, 8);
  const auto conv = [&](int in, int out) { return arch.chebyshev_order * in * out + out; };
  const auto dense = [](int in, int out) { return in * out + out; };
  int expected = 0;
  int in = arch.input_channels;
  for (int c : arch.encoder_channels) {
    expected += conv(in, c);
    in = c;
  }
  const int flat = static_cast<int>(arch.vertex_counts.back()) * arch.encoder_channels.back();
  expected += dense(flat, 2) + 2 * dense(flat + 2, arch.latent);
  expected += dense(arch.latent + 2, static_cast<int>(arch.vertex_counts.back()) *
                                         arch.decoder_channels.front());
  for (std::size_t i = 0; i < arch.decoder_channels.size(); ++i) {
    const int out = i + 1 < arch.decoder_channels.size() ? arch.decoder_channels[i + 1] : 3;
    expected += conv(arch.decoder_channels[i], out);
  }
  EXPECT_EQ(m.parameters().scalar_count(), static_cast<std::size_t>(expected));
}

TEST_F(ToyModels, DefaultWidths) {
  Architecture a;
  EXPECT_EQ(a.encoder_channels, (std::vector<int>{16, 16, 16, 32}));
  EXPECT_EQ(a.decoder_channels, (std::vector<int>{32, 16, 16, 16}));
  EXPECT_EQ(a.chebyshev_order, 6);
  EXPECT_EQ(a.latent, 16);
  EXPECT_EQ(vae_architecture(*h).latent, 18);
  EXPECT_EQ(classifier_architecture(*h, 6).input_channels, 6);
}

TEST_F(ToyModels, InputContracts) {
  DvaeModel m(dvae_architecture(*h), h, 9);
  EXPECT_THROW(m.encode_label(Matrix::Zero(11, 3)), ContractViolation);
  EXPECT_THROW(m.encode_latent(Matrix::Zero(12, 3), Matrix::Zero(1, 2)), ContractViolation);
  EXPECT_THROW(m.decode(Matrix::Zero(1, 15), one_hot(0)), ContractViolation);
  Architecture wrong = dvae_architecture(*h);
  wrong.vertex_counts[0] = 13;
  EXPECT_THROW(DvaeModel(wrong, h, 1), ContractViolation);
  Architecture deep = dvae_architecture(*h);
  deep.encoder_channels.push_back(8);
  EXPECT_THROW(DvaeModel(deep, h, 1), ContractViolation);
}

TEST_F(ToyModels, DenseMatchesItsDefinition) {
  ParameterSet params;
  Dense d(params, "d", 4, 3, rng);
  const Matrix in = random_matrix(5, 4, rng);
  ad::Tape t(GradMode::kInference);
  const Matrix out = d(t, params, t.constant(in)).value();
  const Matrix expected = (in * params[ad::ParamId{0}].value).rowwise() +
                          params[ad::ParamId{1}].value.row(0);
  EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-14);
  // fan-in bound
  EXPECT_LE(params[ad::ParamId{0}].value.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_EQ(params[ad::ParamId{1}].value.cwiseAbs().sum(), 0.0);
}

TEST_F(ToyModels, ChebConvOfOrderOneIsAPointwiseLayer) {
  ParameterSet params;
  ChebConv conv(params, "c", 3, 5, 1, rng);
  params[ad::ParamId{1}].value = random_matrix(1, 5, rng);
  const Matrix in = x();
  ad::Tape t(GradMode::kInference);
  const Matrix out = conv(t, params, t.constant(in), h->laplacians[0]).value();
  const Matrix expected = (in * params[ad::ParamId{0}].value).rowwise() +
                          params[ad::ParamId{1}].value.row(0);
  EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST_F(ToyModels, LayerGradients) {
  ParameterSet params;
  ChebConv conv(params, "conv", 3, 4, 6, rng);
  Dense dense(params, "dense", 48, 2, rng);
  params[ad::ParamId{1}].value = random_matrix(1, 4, rng);
  const Matrix in = x();
  const Matrix w = random_matrix(1, 2, rng);
  auto loss = [&](ad::Tape& t) {
    ad::Var y = ad::relu(conv(t, params, t.constant(in), h->laplacians[0]));
    ad::Var flat = ad::reshape(y, 1, 48);
    return ad::sum(ad::mul(dense(t, params, flat), t.constant(w)));
  };
  EXPECT_LT(ad::gradcheck(params, loss).max_relative_error, 1e-4);
  // and with respect to the layer input
  auto input_loss = [&](ad::Tape& t, ad::Var v) {
    return ad::sum_squares(conv(t, params, v, h->laplacians[0]));
  };
  EXPECT_LT(ad::gradcheck_input(in, input_loss).max_relative_error, 1e-4);
}

TEST_F(ToyModels, FullNetworkGradients) {
  // Central differences need every ReLU input to stay clear of zero within
  // one step; the fixed draw below does (seed 10 with this input does not).
  DvaeModel m(dvae_architecture(*h, 4), h, 21);
  const Matrix in = x();
  const Matrix z = random_matrix(1, 4, rng);
  auto loss = [&](ad::Tape& t) {
    ad::Var f = m.features(t, t.constant(in));
    ad::Var y = t.constant(one_hot(1));
    const auto lat = m.latent(t, f, y);
    ad::Var logits = m.label_logits(t, f);
    ad::Var xhat = m.decode(t, ad::add(lat.mu, t.constant(z)), y);
    return ad::add(ad::add(ad::sum_squares(xhat), ad::sum(ad::log_softmax(logits))),
                   ad::sum(ad::exp(lat.logvar)));
  };
  const auto r = ad::gradcheck(m.parameters(), loss);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_parameter << "[" << r.worst_entry
                                        << "] analytic " << r.analytic << " numeric " << r.numeric;
}

TEST_F(ToyModels, ClassifierProbabilitiesAndGradients) {
  Classifier c(classifier_architecture(*h, 6), h, 11);
  const Matrix in = random_matrix(12, 6, rng);
  const Matrix p = c.probabilities(in);
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_EQ(c.predict(in), argmax_label(p));
  EXPECT_THROW(c.probabilities(x()), ContractViolation);
  auto loss = [&](ad::Tape& t) { return ad::sum(ad::log_softmax(c.logits(t, t.constant(in)))); };
  EXPECT_LT(ad::gradcheck(c.parameters(), loss).max_relative_error, 1e-4);
}

TEST_F(ToyModels, VaeReconstructDecodesTheMean) {
  VaeModel v(vae_architecture(*h), h, 12);
  const Matrix in = x();
  EXPECT_TRUE(bit_equal(v.reconstruct(in), v.decode(v.encode_latent(in).mu)));
  EXPECT_EQ(v.reconstruct(in).rows(), 12);
}

class Checkpoints : public ToyModels {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dvae_ckpt_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST_F(Checkpoints, RoundTripStoresSinglePrecision) {
  DvaeModel m(dvae_architecture(*h), h, 13);
  save_checkpoint(dir / "m.ckpt", m, {{"seed", 13}});
  EXPECT_EQ(read_checkpoint_architecture(dir / "m.ckpt"), m.architecture());
  const auto back = load_model<DvaeModel>(dir / "m.ckpt", h);
  ASSERT_EQ(back.parameters().size(), m.parameters().size());
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    const auto& a = m.parameters()[ad::ParamId{i}];
    const auto& b = back.parameters()[ad::ParamId{i}];
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(b.value, a.value.cast<float>().cast<double>());
  }
  const auto meta = read_sidecar(dir / "m.ckpt");
  EXPECT_EQ(meta["seed"], 13);
  EXPECT_EQ(meta["model"], "dvae");
  EXPECT_EQ(meta["format_version"], kCheckpointFormatVersion);
  EXPECT_EQ(sidecar_path(dir / "m.ckpt"), dir / "m.json");
}

TEST_F(Checkpoints, VersionMismatchNamesBothVersions) {
  Classifier c(classifier_architecture(*h), h, 14);
  save_checkpoint(dir / "c.ckpt", c);
  {
    std::fstream f(dir / "c.ckpt", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    f.put(static_cast<char>(kCheckpointFormatVersion + 4));
  }
  try {
    read_checkpoint_architecture(dir / "c.ckpt");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(std::to_string(kCheckpointFormatVersion + 4)), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(kCheckpointFormatVersion)), std::string::npos) << msg;
  }
}

TEST_F(Checkpoints, RejectsForeignFilesAndOtherArchitectures) {
  std::ofstream(dir / "junk.ckpt") << "definitely not a checkpoint";
  EXPECT_THROW(read_checkpoint_architecture(dir / "junk.ckpt"), FormatError);
  Classifier c3(classifier_architecture(*h, 3), h, 15);
  Classifier c6(classifier_architecture(*h, 6), h, 15);
  save_checkpoint(dir / "c3.ckpt", c3);
  EXPECT_THROW(load_parameters(dir / "c3.ckpt", c6), FormatError);
  // truncation anywhere in the payload is caught
  fs::resize_file(dir / "c3.ckpt", fs::file_size(dir / "c3.ckpt") - 10);
  EXPECT_THROW(load_parameters(dir / "c3.ckpt", c3), FormatError);
}

}  // namespace
