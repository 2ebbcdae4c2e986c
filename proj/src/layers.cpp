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

#include "nplab/layers.hpp"

#include "nplab/errors.hpp"

namespace nplab {

void init_mlp(const MlpSpec& spec, ParameterSet& params, Rng& rng) {
  if (spec.widths.size() < 2) throw ContractError("mlp '" + spec.name + "' needs at least in/out widths");
  for (std::size_t k = 0; k < spec.depth(); ++k) {
    const std::string idx = std::to_string(k);
    params[spec.name + ".w" + idx] = init_weight(spec.widths[k], spec.widths[k + 1], rng);
    params[spec.name + ".b" + idx] = Matrix::Zero(1, spec.widths[k + 1]);
  }
}

Var mlp_forward(Binder& bind, const MlpSpec& spec, Var x, Activation hidden, Activation output) {
  if (x.cols() != spec.in()) {
    throw DimensionError("mlp '" + spec.name + "': input width " + std::to_string(x.cols()) +
                         ", expected " + std::to_string(spec.in()));
  }
  Var h = x;
  for (std::size_t k = 0; k < spec.depth(); ++k) {
    const std::string idx = std::to_string(k);
    h = affine(h, bind(spec.name + ".w" + idx), bind(spec.name + ".b" + idx));
    const Activation act = k + 1 == spec.depth() ? output : hidden;
    if (act == Activation::relu) h = relu(h);
  }
  if (!h.value().allFinite()) throw NumericError("mlp '" + spec.name + "': non-finite output");
  return h;
}

}  // namespace nplab
