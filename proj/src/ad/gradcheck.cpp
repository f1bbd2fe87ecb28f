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

#include "dvae/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace dvae::ad {
namespace {

double loss_value(const LossBuilder& loss) {
  Tape tape(GradMode::kInference);
  return loss(tape).value()(0, 0);
}

void consider(GradcheckReport& report, const GradcheckOptions& options,
              const std::string& name, Index entry, double analytic,
              double numeric) {
  const double denom = std::max(
      {std::abs(analytic), std::abs(numeric), options.denominator_floor});
  const double err = std::abs(analytic - numeric) / denom;
  ++report.entries_checked;
  if (report.entries_checked == 1 || err > report.max_relative_error) {
    report.max_relative_error = err;
    report.worst_parameter = name;
    report.worst_entry = entry;
    report.analytic = analytic;
    report.numeric = numeric;
  }
}

}  // namespace

GradcheckReport gradcheck(ParameterSet& params, const LossBuilder& loss,
                          const GradcheckOptions& options) {
  Gradients analytic;
  {
    Tape tape;
    Var l = loss(tape);
    analytic = backward(tape, l, params);
  }
  GradcheckReport report;
  const double h = options.step;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamId id{i};
    Matrix& value = params[id].value;
    for (Index k = 0; k < value.size(); ++k) {
      const double saved = value.data()[k];
      value.data()[k] = saved + h;
      const double plus = loss_value(loss);
      value.data()[k] = saved - h;
      const double minus = loss_value(loss);
      value.data()[k] = saved;
      consider(report, options, params[id].name, k, analytic[id].data()[k],
               (plus - minus) / (2.0 * h));
    }
  }
  return report;
}

GradcheckReport gradcheck_input(const Matrix& point,
                                const InputLossBuilder& loss,
                                const GradcheckOptions& options) {
  Matrix analytic;
  {
    Tape tape;
    Var x = tape.input(point);
    Var l = loss(tape, x);
    tape.backward(l);
    analytic = tape.grad(x);
  }
  auto eval = [&](const Matrix& at) {
    Tape tape(GradMode::kInference);
    Var x = tape.input(at);
    return loss(tape, x).value()(0, 0);
  };
  GradcheckReport report;
  Matrix probe = point;
  for (Index k = 0; k < probe.size(); ++k) {
    const double saved = probe.data()[k];
    probe.data()[k] = saved + options.step;
    const double plus = eval(probe);
    probe.data()[k] = saved - options.step;
    const double minus = eval(probe);
    probe.data()[k] = saved;
    consider(report, options, "input", k, analytic.data()[k],
             (plus - minus) / (2.0 * options.step));
  }
  return report;
}

}  // namespace dvae::ad
