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

// Evaluation metrics: per-point negative log predictive density under the
// two context conventions, deterministic-inference MSE, and predictive
// entropy with its empirical CDF.

#ifndef NPLAB_EVAL_HPP
#define NPLAB_EVAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "nplab/predict.hpp"

namespace nplab {

/// One evaluation task: all points of a realisation plus which of them
/// form the context.
struct EvalRealization {
  Matrix x;
  Matrix y;
  std::vector<Index> context_rows;
};

/// J averages over every point including the context; P over the
/// non-context points only.
enum class Convention { joint, points };
std::string to_string(Convention c);

struct NllResult {
  double joint = 0.0;   // NaN when not applicable
  double points = 0.0;  // NaN when there are no non-context points anywhere
  double joint_se = 0.0;
  double points_se = 0.0;
  bool joint_applicable = true;
  Index realizations = 0;
};

/// Per-point -ln p(y_i) from the K*S mixture for every row of a realisation.
Vector pointwise_nll(const NpModel& model, const EvalRealization& r, int k, int s, Rng& rng);

/// CNP only predicts off-context points, so its J row is not applicable.
NllResult eval_nll(const NpModel& model, const std::vector<EvalRealization>& set, int k, int s, Rng& rng);

struct MseResult {
  double mse = 0.0;
  RowVector per_dimension;
};

/// Deterministic-inference squared error on the non-context points,
/// averaged over points and output dimensions.
MseResult eval_mse(const NpModel& model, const std::vector<EvalRealization>& set);
double mse(const Matrix& prediction, const Matrix& target);

/// -sum_c p_c ln p_c in nats, clamped to [0, ln C]. Throws ContractError if
/// p is not on the simplex (tolerance 1e-6).
double predictive_entropy(const RowVector& probs);
std::vector<double> predictive_entropies(const Matrix& probs);

/// Empirical CDF on `grid_size` even points over [0, h_max].
std::vector<std::pair<double, double>> entropy_cdf(const std::vector<double>& entropies, Index grid_size,
                                                   double h_max);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single value
  int n = 0;
};
MeanVar mean_and_variance(const std::vector<double>& xs);

}  // namespace nplab

#endif  // NPLAB_EVAL_HPP
