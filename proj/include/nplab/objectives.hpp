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

// Training objectives. Every loss is a negative bound to be minimised:
//
//   cnp    mean_t -ln p(y_t | r_C, x_t)
//   np     mean_k mean_t -ln p(y_t | z_G^k, x_t) + w_g KL(q_G || p_G) / M
//   dsvnp  mean_k [ mean_s mean_t -ln p(y_t | z_G^k, z_t^{k,s}, x_t)
//                   + w_l mean_t KL(q_L^k(t) || p_L^k(t)) ] + w_g KL(q_G || p_G) / M
//
// M is the number of targets: the bound over the whole target set, divided
// by M so each term is per point. Leaving the global KL undivided weights it
// M times too heavily and the global latent collapses onto its prior.
// q_G pools the full target set, p_G the context only. The same expression
// with w_l = w_g = 1 is the unweighted Monte-Carlo bound.

#ifndef NPLAB_OBJECTIVES_HPP
#define NPLAB_OBJECTIVES_HPP

#include <vector>

#include "nplab/np_ops.hpp"

namespace nplab {

/// One task: a context set and the target set it is scored on.
/// For CNP the targets exclude the context; for the latent variants they
/// include it (context rows first).
struct ContextTargetBatch {
  Matrix x_context;
  Matrix y_context;
  Matrix x_target;
  Matrix y_target;
  bool context_in_target = true;

  Index num_context() const { return x_context.rows(); }
  Index num_target() const { return x_target.rows(); }
};

struct KlWeights {
  double local = 1.0;
  double global = 1.0;
};

/// Reparameterisation noise for one loss evaluation.
/// global: K x dim_lat; local[k][s]: M x dim_lat (DSVNP only).
struct NoiseSet {
  Matrix global;
  std::vector<std::vector<Matrix>> local;

  int k() const { return static_cast<int>(global.rows()); }
  int s() const { return local.empty() ? 0 : static_cast<int>(local.front().size()); }
};

/// Standard-normal noise sized for `model` and `num_target` target rows.
NoiseSet draw_noise(const NpModel& model, Index num_target, int k, int s, Rng& rng);
NoiseSet zero_noise(const NpModel& model, Index num_target, int k, int s);

struct ElboTerms {
  Var reconstruction;  // mean per-target negative log-likelihood (or MSE / CE)
  Var kl_local;        // averaged over k and targets; zero node when absent
  Var kl_global;       // divided by the number of targets, like every other term
  Var loss;            // reconstruction + w_l kl_local + w_g kl_global
};

/// Reconstruction term for decoder output vs targets under the model's likelihood.
Var reconstruction_loss(ModelGraph& g, Var head_or_mean, const GaussianNode* dist, Var y);

ElboTerms loss_cnp(ModelGraph& g, const ContextTargetBatch& batch);
ElboTerms elbo_np(ModelGraph& g, const ContextTargetBatch& batch, const NoiseSet& noise,
                  const KlWeights& w);
ElboTerms elbo_dsvnp(ModelGraph& g, const ContextTargetBatch& batch, const NoiseSet& noise,
                     const KlWeights& w);

/// Dispatches on the model variant. Throws ContractError on an empty
/// context (training requires at least one point) and NumericError if the
/// loss is not finite.
ElboTerms model_loss(ModelGraph& g, const ContextTargetBatch& batch, const NoiseSet& noise,
                     const KlWeights& w);

double evaluate_loss(const NpModel& model, const ContextTargetBatch& batch, const NoiseSet& noise,
                     const KlWeights& w);

struct LossAndGradients {
  double loss = 0.0;
  Gradients gradients;
};

/// Mean loss over several tasks and its gradient with respect to every parameter.
LossAndGradients loss_and_gradients(const NpModel& model, const std::vector<ContextTargetBatch>& tasks,
                                    const std::vector<NoiseSet>& noise, const KlWeights& w);

}  // namespace nplab

#endif  // NPLAB_OBJECTIVES_HPP
