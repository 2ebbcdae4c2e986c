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

// 1-D regression tasks: a fixed function observed on two disjoint intervals,
// and sine-warped Gaussian-process curves on an even grid.

#ifndef NPLAB_DATA_SYNTHETIC_HPP
#define NPLAB_DATA_SYNTHETIC_HPP

#include <string>
#include <vector>

#include "nplab/data/tabular.hpp"
#include "nplab/gp.hpp"
#include "nplab/parameters.hpp"

namespace nplab::data {

/// y = u + sin(4u) + sin(13u) with u = x + eps.
double osband_function(double x, double eps = 0.0);

struct OsbandConfig {
  double noise_std = 0.003;
  double eval_lo = -0.5;
  double eval_hi = 1.5;
  Index eval_points = 200;
};

/// 12 points from U[0, 0.6] and 8 from U[0.8, 1.0]; not standardised.
TabularDataset osband_dataset(Rng& rng, const OsbandConfig& cfg = {});
/// Noise-free function on the evaluation grid, as an n x 1 input and output.
void osband_eval_grid(const OsbandConfig& cfg, Matrix& x, Matrix& y);

struct Curve {
  Matrix x;  // n x 1
  Matrix y;  // n x 1
};

struct SpCurveConfig {
  double grid_lo = -2.0;
  double grid_hi = 2.0;
  Index grid_points = 400;
  double train_lo = -1.0;
  double train_hi = 1.0;
  RbfKernel kernel;
};

/// Draws warped curves y = sin(f(x) + x), f ~ GP(0, k), on a fixed grid.
class SpCurveTask {
 public:
  explicit SpCurveTask(const SpCurveConfig& cfg = {});

  Curve sample(Rng& rng) const;
  std::vector<Curve> sample_batch(Index n_curves, Rng& rng) const;
  /// Rows of the grid inside the training interval.
  const std::vector<Index>& train_rows() const { return train_rows_; }
  Curve restrict_to_train(const Curve& c) const;
  const SpCurveConfig& config() const { return cfg_; }

 private:
  SpCurveConfig cfg_;
  GpPriorSampler sampler_;
  std::vector<Index> train_rows_;
};

std::vector<Curve> sp_curve_batch(Index n_curves, Rng& rng, const SpCurveConfig& cfg = {});

/// Closed-form moments of y = sin(Z + x), Z ~ N(0, s2):
/// E[y] = sin(x) e^{-s2/2}, E[y^2] = (1 - cos(2x) e^{-2 s2}) / 2.
double warped_mean(double x, double s2);
double warped_second_moment(double x, double s2);

/// CSV with columns curve_id,x,y.
std::string curves_to_csv(const std::vector<Curve>& curves);

}  // namespace nplab::data

#endif  // NPLAB_DATA_SYNTHETIC_HPP
