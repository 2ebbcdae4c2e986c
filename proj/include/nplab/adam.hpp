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

#ifndef NPLAB_ADAM_HPP
#define NPLAB_ADAM_HPP

#include <cstdint>

#include "nplab/parameters.hpp"

namespace nplab {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamOptions options;
  ParameterSet m;
  ParameterSet v;
  std::uint64_t t = 0;
};

/// One bias-corrected Adam descent step on every parameter in `params`.
///
/// A parameter whose gradient is identically zero (it is not on the loss
/// path) is left untouched together with its moments, so a zero gradient
/// is the identity at any step count. Throws DimensionError if a gradient
/// shape disagrees and NumericError naming the parameter on NaN/Inf.
void adam_step(ParameterSet& params, const Gradients& grads, AdamState& state);

}  // namespace nplab

#endif  // NPLAB_ADAM_HPP
