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

#include "dvae/evaluation/missing.hpp"

#include <cstdio>
#include <sstream>

#include "dvae/common/error.hpp"
#include "dvae/common/parallel.hpp"
#include "dvae/training/trainer.hpp"

namespace dvae::evaluation {

std::string to_string(Method m) {
  switch (m) {
    case Method::kC: return "C";
    case Method::kDvae: return "DVAE";
    case Method::kVaeC: return "VAE+C";
    case Method::kDvaeCRecon: return "DVAE+C_recon";
  }
  return "unknown";
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int i = 0; i <= 7; ++i) f.push_back(0.1 * i);
  return f;
}

nlohmann::json BenchResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    nlohmann::json acc;
    for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
      acc[to_string(kAllMethods[m])] = mean_accuracy[i][m];
    }
    rows.push_back({{"fraction", fractions[i]}, {"accuracy", acc}});
  }
  nlohmann::json per_side = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json acc;
    for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
      acc[to_string(kAllMethods[m])] = c.accuracy[m];
    }
    per_side.push_back({{"fraction", c.fraction},
                        {"side", training::to_string(c.side)},
                        {"accuracy", acc}});
  }
  return {{"mean_over_sides", rows}, {"per_side", per_side}};
}

std::string BenchResult::table() const {
  std::ostringstream out;
  out << "fraction";
  for (auto m : kAllMethods) out << '\t' << to_string(m);
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.2f", fractions[i]);
    out << buf;
    for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
      std::snprintf(buf, sizeof(buf), "%.4f", mean_accuracy[i][m]);
      out << '\t' << buf;
    }
    out << '\n';
  }
  return out.str();
}

BenchResult missing_benchmark(const BenchModels& models, const training::LabeledSet& test,
                              const mesh::NormalizationStats& stats,
                              const std::vector<double>& fractions, std::size_t jobs) {
  DVAE_REQUIRE(models.c && models.dvae && models.vae && models.c_recon,
               "missing_benchmark: every model is required");
  DVAE_REQUIRE(!test.empty(), "missing_benchmark: empty test set");
  const model::Classifier& vae_c = models.vae_c ? *models.vae_c : *models.c;
  const std::size_t n = test.size();
  std::vector<ad::Matrix> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = stats.invert(test.x[i]);

  BenchResult result;
  result.fractions = fractions;
  for (double f : fractions) {
    std::array<double, 4> mean{};
    for (training::Side side : training::kAllSides) {
      std::vector<std::array<int, 4>> hits(n);
      parallel_for(n, jobs, [&](std::size_t i) {
        const ad::Matrix x = training::mask_band(test.x[i], raw[i], side, f);
        const int y = test.y[i];
        hits[i][0] = models.c->predict(x) == y;
        hits[i][1] = model::argmax_label(models.dvae->encode_label(x)) == y;
        hits[i][2] = vae_c.predict(models.vae->reconstruct(x)) == y;
        hits[i][3] =
            models.c_recon->predict(training::recon_difference_input(*models.dvae, x)) == y;
      });
      BenchCell cell;
      cell.fraction = f;
      cell.side = side;
      for (const auto& h : hits) {
        for (std::size_t m = 0; m < 4; ++m) cell.accuracy[m] += h[m];
      }
      for (std::size_t m = 0; m < 4; ++m) {
        cell.accuracy[m] /= static_cast<double>(n);
        mean[m] += cell.accuracy[m] / static_cast<double>(training::kAllSides.size());
      }
      result.cells.push_back(cell);
    }
    result.mean_accuracy.push_back(mean);
  }
  return result;
}

}  // namespace dvae::evaluation
