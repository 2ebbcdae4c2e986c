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

#ifndef NPLAB_LAYERS_HPP
#define NPLAB_LAYERS_HPP

#include <string>
#include <vector>

#include "nplab/parameters.hpp"

namespace nplab {

enum class Activation { none, relu };

/// A stack of affine layers. `widths` = {in, hidden..., out}; parameters are
/// stored as "<name>.w<k>" (in x out) and "<name>.b<k>" (1 x out).
struct MlpSpec {
  std::string name;
  std::vector<Index> widths;

  Index in() const { return widths.front(); }
  Index out() const { return widths.back(); }
  std::size_t depth() const { return widths.size() - 1; }
};

/// Adds freshly initialised weights (biases zero) for `spec` to `params`.
void init_mlp(const MlpSpec& spec, ParameterSet& params, Rng& rng);

/// Runs x through the stack. `hidden` is applied between layers, `output`
/// after the last one. Throws DimensionError on a width mismatch and
/// NumericError if the result is not finite.
Var mlp_forward(Binder& bind, const MlpSpec& spec, Var x, Activation hidden = Activation::relu,
                Activation output = Activation::none);

}  // namespace nplab

#endif  // NPLAB_LAYERS_HPP
