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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dvae/app/commands.hpp"
#include "dvae/app/run_config.hpp"
#include "dvae/common/error.hpp"
#include "dvae/evaluation/procedures.hpp"
#include "dvae/mesh/mesh_io.hpp"

#include <unistd.h>

namespace {

namespace fs = std::filesystem;
using namespace dvae;
using namespace dvae::app;
using ad::Matrix;

TEST(Config, RoundTripsThroughJson) {
  RunConfig c;
  c.seed = 77;
  c.train.alpha = 3.5;
  c.grid.alphas = {1.0};
  c.hierarchy_factors = {2, 2};
  const RunConfig back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, UnknownKeysAreNamed) {
  try {
    RunConfig::from_json(nlohmann::json{{"train", {{"epoch", 3}}}});
    FAIL() << "expected ContractViolation";
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
  EXPECT_THROW(RunConfig::from_json(nlohmann::json{{"colour", 1}}), ContractViolation);
}

TEST(Config, OverridesUseDottedPaths) {
  RunConfig c;
  apply_overrides(c, {"train.epochs=7", "population.n_subjects=20", "seed=9",
                      "grid.alphas=[1,2]", "train.augment=true"});
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.population.n_subjects, 20u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.grid.alphas, (std::vector<double>{1.0, 2.0}));
  EXPECT_TRUE(c.train.augment);
  EXPECT_TRUE(c.train_config().augmentation.has_value());
  EXPECT_EQ(c.train.alpha, RunConfig{}.train.alpha);
  EXPECT_THROW(apply_overrides(c, {"train.epochs"}), ContractViolation);
  EXPECT_THROW(apply_overrides(c, {"train.nope=1"}), ContractViolation);
}

TEST(Config, ClassNames) {
  EXPECT_EQ(parse_class("male"), 0);
  EXPECT_EQ(parse_class("female"), 1);
  EXPECT_EQ(class_name(1), "female");
  EXPECT_THROW(parse_class("other"), ContractViolation);
}

// ---- the executable --------------------------------------------------------------

struct Outcome {
  int code;
  std::string output;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("dvae_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  /// Runs the CLI with a small population and returns exit code and output.
  static Outcome run(const std::string& args) {
    const fs::path log = root_ / "last.log";
    const std::string cmd = std::string(DVAE_MESH_CLI) + " --out " + root_.string() +
                            " --set population.subdivisions=1" +
                            " --set population.n_subjects=20" +
                            " --set hierarchy.factors=[2,2]" +
                            " --set train.epochs=3 --set train.batch_size=8 " + args +
                            " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream text;
    text << in.rdbuf();
    return {WEXITSTATUS(status), text.str()};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static inline fs::path root_;
};

TEST_F(Cli, GenIsReproducible) {
  ASSERT_EQ(run("--seed 5 --run-name g1 gen").code, 0);
  ASSERT_EQ(run("--seed 5 --run-name g2 gen").code, 0);
  ASSERT_EQ(run("--seed 6 --run-name g3 gen").code, 0);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root_ / "g1" / "data")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(e.path(), root_ / "g1");
    EXPECT_EQ(slurp(e.path()), slurp(root_ / "g2" / rel)) << rel;
  }
  EXPECT_GT(files, 20);
  EXPECT_NE(slurp(root_ / "g1" / "data" / "manifest.json"),
            slurp(root_ / "g3" / "data" / "manifest.json"));
  EXPECT_TRUE(fs::exists(root_ / "g1" / "config.json"));
}

TEST_F(Cli, PipelineEndToEnd) {
  ASSERT_EQ(run("--seed 3 --run-name data gen --perturb").code, 0);
  const Outcome aligned = run("--run-name aligned align " + (root_ / "data" / "data").string());
  ASSERT_EQ(aligned.code, 0) << aligned.output;
  const std::string data = (root_ / "aligned" / "aligned").string();

  for (const std::string model : {"dvae", "vae", "c"}) {
    const Outcome r = run("--run-name " + model + " train " + model + " --data " + data);
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(root_ / model / (model + ".ckpt")));
    EXPECT_TRUE(fs::exists(root_ / model / "train_log.csv"));
  }
  const std::string dvae = (root_ / "dvae" / "dvae.ckpt").string();
  const std::string c = (root_ / "c" / "c.ckpt").string();
  const Outcome cr = run("--run-name crecon train crecon --data " + data + " --dvae " + dvae);
  ASSERT_EQ(cr.code, 0) << cr.output;

  // transform with a known label matches sex_preservation in process
  const fs::path mesh = fs::path(data) / "subject_0000.ply";
  ASSERT_TRUE(fs::exists(mesh));
  const Outcome t = run("--run-name tr transform " + mesh.string() + " --dvae " + dvae +
                    " --as female --label female");
  ASSERT_EQ(t.code, 0) << t.output;
  const fs::path out = root_ / "tr" / (mesh.stem().string() + "_as_female.ply");
  ASSERT_TRUE(fs::exists(out)) << t.output;
  const auto loaded = load_dvae(dvae);
  const Matrix x = loaded.stats.apply(mesh::read_mesh(mesh).vertices);
  const Matrix expected = loaded.stats.invert(evaluation::sex_preserve(loaded.model, x, 1));
  EXPECT_LT((mesh::read_mesh(out).vertices - expected).cwiseAbs().maxCoeff(), 1e-4);

  const Outcome q0 = run("--run-name tr2 transform " + mesh.string() + " --dvae " + dvae);
  ASSERT_EQ(q0.code, 0) << q0.output;
  EXPECT_NE(q0.output.find("using q0's estimate"), std::string::npos);

  const Outcome s = run("--run-name sal saliency " + mesh.string() + " --classifier " + c +
                    " --variant unnormalized");
  ASSERT_EQ(s.code, 0) << s.output;
  EXPECT_TRUE(fs::exists(root_ / "sal" / (mesh.stem().string() + "_saliency_unnormalized_male.ply")));

  const Outcome b = run("--run-name bench --set missing.fractions=[0,0.5] missing-bench --data " +
                    data + " --c " + c + " --dvae " + dvae + " --vae " +
                    (root_ / "vae" / "vae.ckpt").string() + " --crecon " +
                    (root_ / "crecon" / "crecon.ckpt").string() + " --vae-c " + c);
  ASSERT_EQ(b.code, 0) << b.output;
  const auto bench = nlohmann::json::parse(slurp(root_ / "bench" / "missing_bench.json"));
  EXPECT_EQ(bench["mean_over_sides"].size(), 2u);

  const Outcome rep = run("--run-name rep report --data " + data + " --dvae " + dvae + " --c " + c);
  ASSERT_EQ(rep.code, 0) << rep.output;
  const auto report = nlohmann::json::parse(slurp(root_ / "rep" / "report.json"));
  EXPECT_TRUE(report.contains("ca"));
  EXPECT_TRUE(report.contains("distance_map_mass_in_region"));
  EXPECT_TRUE(fs::exists(root_ / "rep" / "distance_map.ply"));

  // a checkpoint from a different format version is refused
  const fs::path old = root_ / "dvae" / "old.ckpt";
  fs::copy_file(dvae, old);
  fs::copy_file(root_ / "dvae" / "dvae.json", root_ / "dvae" / "old.json");
  {
    std::fstream f(old, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    f.put(static_cast<char>(99));
  }
  const Outcome refused = run("--run-name refused transform " + mesh.string() + " --dvae " +
                          old.string());
  EXPECT_EQ(refused.code, 1);
  EXPECT_NE(refused.output.find("version 99"), std::string::npos) << refused.output;
}

TEST_F(Cli, BadInputsExitNonZero) {
  EXPECT_NE(run("").code, 0);
  EXPECT_NE(run("train nonsense --data x").code, 0);
  const Outcome missing = run("--run-name miss train dvae --data " + (root_ / "nowhere").string());
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.output.find("\nerror: "), std::string::npos) << missing.output;
  const Outcome bad_set = run("--run-name badset --set train.colour=1 gen");
  EXPECT_EQ(bad_set.code, 1);
  EXPECT_NE(bad_set.output.find("colour"), std::string::npos);
}

}  // namespace
