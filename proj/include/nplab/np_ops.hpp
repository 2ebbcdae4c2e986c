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

// Building blocks shared by every variant. All functions record onto the
// graph's tape; rows are set elements, so a context of N points is an
// N x (dx + dy) block and a target set of M points an M x dx block.

#ifndef NPLAB_NP_OPS_HPP
#define NPLAB_NP_OPS_HPP

#include "nplab/gaussian.hpp"
#include "nplab/model.hpp"

namespace nplab {

/// A model bound to a tape for one forward (and possibly backward) pass.
struct ModelGraph {
  ModelGraph(const NpModel& m, Tape& tape, bool differentiable = true)
      : model(m), bind(tape, m.params, differentiable) {}

  Tape& tape() { return bind.tape(); }

  const NpModel& model;
  Binder bind;
};

enum class HeadKind { posterior, prior };

/// r_C = mean_i h(x_i, y_i), a 1 x dim_lat row. An empty context yields the
/// learned null-context vector.
Var encode_context(ModelGraph& g, Var x, Var y);

/// Diagonal Gaussian over z_G from a pooled representation r.
GaussianNode global_head(ModelGraph& g, Var r, HeadKind which);

/// Softmax(q k^T / sqrt(dim_latx)) S for every query row: M x dim_lat.
Var attention_embed(ModelGraph& g, Var x_context, Var y_context, Var x_query);

/// q(z_* | z_G, x_*, y_*); `z_global` is M x dim_lat (one row per target).
GaussianNode local_posterior(ModelGraph& g, Var z_global, Var x, Var y);
/// p(z_* | z_G, x_*).
GaussianNode local_prior(ModelGraph& g, Var z_global, Var x);

/// Raw decoder output for targets x given per-row latent blocks, which are
/// concatenated in order after x. Throws ContractError if their total width
/// does not match the variant.
Var decoder_head(ModelGraph& g, std::initializer_list<Var> latents, Var x);

/// Decoder output as a Gaussian over y. Under the MSE likelihood the sigma
/// head is ignored and a unit sigma is reported.
GaussianNode decode(ModelGraph& g, std::initializer_list<Var> latents, Var x);

}  // namespace nplab

#endif  // NPLAB_NP_OPS_HPP
