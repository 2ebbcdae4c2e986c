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

// Prediction by ancestral sampling through the prior networks, and the
// deterministic plug-in that feeds prior means through the decoder.

#ifndef NPLAB_PREDICT_HPP
#define NPLAB_PREDICT_HPP

#include <vector>

#include "nplab/objectives.hpp"

namespace nplab {

/// Uniform mixture of diagonal Gaussians over y_* (each component M x dy).
struct PredictiveMixture {
  std::vector<GaussianParams> components;

  Index size() const { return static_cast<Index>(components.size()); }
  Matrix mean() const;
  /// Law of total variance over components.
  Matrix variance() const;
  /// ln p(y_i) for every row i, via log-sum-exp over components.
  Vector log_density(const Matrix& y) const;
};

/// K*S components for the latent variants; one for CNP. The rng is consumed
/// as: global noise first (K*S rows for np/attn_np, K rows for dsvnp), then
/// for dsvnp the local noise blocks [k][s] of M x dim_lat.
PredictiveMixture predict(const NpModel& model, const Matrix& x_context, const Matrix& y_context,
                          const Matrix& x_query, int k, int s, Rng& rng);

/// The noise `predict` draws, in the same order: K*S global rows for
/// np/attn_np; K global rows and [K][S] blocks of M x dim_lat for dsvnp;
/// nothing for cnp.
NoiseSet prediction_noise(const NpModel& model, Index num_query, int k, int s, Rng& rng);

/// Same as above with explicit noise, one component per global row (per
/// local block for dsvnp).
PredictiveMixture predict(const NpModel& model, const Matrix& x_context, const Matrix& y_context,
                          const Matrix& x_query, const NoiseSet& noise);

/// Prior means for every latent, one decoder pass.
GaussianParams predict_deterministic(const NpModel& model, const Matrix& x_context,
                                     const Matrix& y_context, const Matrix& x_query);

/// Categorical decoders: class probabilities averaged over the K*S samples.
Matrix predict_class_probs(const NpModel& model, const Matrix& x_context, const Matrix& y_context,
                           const Matrix& x_query, int k, int s, Rng& rng);

}  // namespace nplab

#endif  // NPLAB_PREDICT_HPP
