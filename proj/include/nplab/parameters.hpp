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

#ifndef NPLAB_PARAMETERS_HPP
#define NPLAB_PARAMETERS_HPP

#include <map>
#include <random>
#include <string>

#include "nplab/autodiff.hpp"

namespace nplab {

/// Named parameter arrays. Ordered by name so iteration (and serialisation)
/// is deterministic.
using ParameterSet = std::map<std::string, Matrix>;
using Gradients = std::map<std::string, Matrix>;

using Rng = std::mt19937_64;

/// Derives an independent generator from a base seed and a stream tag.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Binds parameters onto a tape lazily: the first lookup of a name records
/// a leaf, later lookups return the same node.
class Binder {
 public:
  /// With `differentiable` false parameters are bound as constants, which
  /// skips all backward bookkeeping (inference only).
  Binder(Tape& tape, const ParameterSet& params, bool differentiable = true)
      : tape_(&tape), params_(&params), differentiable_(differentiable) {}

  Var operator()(const std::string& name);
  bool has(const std::string& name) const { return params_->count(name) != 0; }

  Tape& tape() { return *tape_; }
  const ParameterSet& params() const { return *params_; }

  /// Gradients after tape().backward(); parameters never looked up get zeros.
  Gradients gradients() const;

 private:
  Tape* tape_;
  const ParameterSet* params_;
  bool differentiable_;
  std::map<std::string, Var> bound_;
};

/// Fan-in scaled uniform weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Matrix init_weight(Index fan_in, Index fan_out, Rng& rng);

bool all_finite(const Matrix& m);

}  // namespace nplab

#endif  // NPLAB_PARAMETERS_HPP
