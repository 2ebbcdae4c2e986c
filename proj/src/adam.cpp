// Copyright 2026 The nplab Authors
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

#include "nplab/adam.hpp"

#include <cmath>

#include "nplab/errors.hpp"

namespace nplab {

void adam_step(ParameterSet& params, const Gradients& grads, AdamState& state) {
  // validate everything before touching any state
  for (const auto& [name, value] : params) {
    auto g = grads.find(name);
    if (g == grads.end()) continue;
    if (g->second.rows() != value.rows() || g->second.cols() != value.cols()) {
      throw DimensionError("adam_step: gradient shape mismatch for '" + name + "'");
    }
    if (!g->second.allFinite()) throw NumericError("adam_step: non-finite gradient for '" + name + "'");
  }

  state.t += 1;
  const AdamOptions& o = state.options;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);

  for (auto& [name, value] : params) {
    auto g = grads.find(name);
    if (g == grads.end() || g->second.isZero(0.0)) continue;
    Matrix& m = state.m[name];
    Matrix& v = state.v[name];
    if (m.size() == 0) {
      m = Matrix::Zero(value.rows(), value.cols());
      v = Matrix::Zero(value.rows(), value.cols());
    }
    const Matrix& grad = g->second;
    m = o.beta1 * m + (1.0 - o.beta1) * grad;
    v = o.beta2 * v + (1.0 - o.beta2) * grad.cwiseAbs2();
    value.array() -= o.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + o.eps);
  }
}

}  // namespace nplab
