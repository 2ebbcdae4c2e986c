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

#include "nplab/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "nplab/errors.hpp"

namespace nplab::data {

double osband_function(double x, double eps) {
  const double u = x + eps;
  return u + std::sin(4.0 * u) + std::sin(13.0 * u);
}

TabularDataset osband_dataset(Rng& rng, const OsbandConfig& cfg) {
  std::uniform_real_distribution<double> left(0.0, 0.6), right(0.8, 1.0);
  std::normal_distribution<double> noise(0.0, cfg.noise_std);
  TabularDataset ds;
  ds.inputs.resize(20, 1);
  ds.outputs.resize(20, 1);
  for (Index i = 0; i < 20; ++i) {
    const double x = i < 12 ? left(rng) : right(rng);
    ds.inputs(i, 0) = x;
    ds.outputs(i, 0) = osband_function(x, noise(rng));
  }
  ds.input_stats = ColumnStats::identity(1);
  ds.output_stats = ColumnStats::identity(1);
  return ds;
}

void osband_eval_grid(const OsbandConfig& cfg, Matrix& x, Matrix& y) {
  x = Vector::LinSpaced(cfg.eval_points, cfg.eval_lo, cfg.eval_hi);
  y = x.unaryExpr([](double v) { return osband_function(v); });
}

SpCurveTask::SpCurveTask(const SpCurveConfig& cfg)
    : cfg_(cfg), sampler_(even_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_points), cfg.kernel) {
  if (!(cfg.train_lo < cfg.train_hi)) throw ConfigError("sp task: train_lo must be < train_hi");
  const auto& g = sampler_.grid();
  for (Index i = 0; i < g.size(); ++i)
    if (g(i) >= cfg.train_lo && g(i) <= cfg.train_hi) train_rows_.push_back(i);
  if (train_rows_.empty()) throw ConfigError("sp task: training interval contains no grid points");
}

Curve SpCurveTask::sample(Rng& rng) const {
  const Vector y0 = sampler_.sample(rng);
  return {sampler_.grid(), warp_curve<double>(sampler_.grid(), y0)};
}

std::vector<Curve> SpCurveTask::sample_batch(Index n_curves, Rng& rng) const {
  if (n_curves < 1) throw ContractError("sp_curve_batch: n_curves must be >= 1");
  std::vector<Curve> out;
  out.reserve(static_cast<std::size_t>(n_curves));
  for (Index i = 0; i < n_curves; ++i) out.push_back(sample(rng));
  return out;
}

Curve SpCurveTask::restrict_to_train(const Curve& c) const {
  Curve out{Matrix(static_cast<Index>(train_rows_.size()), 1), Matrix(static_cast<Index>(train_rows_.size()), 1)};
  for (std::size_t i = 0; i < train_rows_.size(); ++i) {
    out.x(static_cast<Index>(i), 0) = c.x(train_rows_[i], 0);
    out.y(static_cast<Index>(i), 0) = c.y(train_rows_[i], 0);
  }
  return out;
}

std::vector<Curve> sp_curve_batch(Index n_curves, Rng& rng, const SpCurveConfig& cfg) {
  return SpCurveTask(cfg).sample_batch(n_curves, rng);
}

double warped_mean(double x, double s2) { return std::sin(x) * std::exp(-0.5 * s2); }

double warped_second_moment(double x, double s2) { return 0.5 * (1.0 - std::cos(2.0 * x) * std::exp(-2.0 * s2)); }

std::string curves_to_csv(const std::vector<Curve>& curves) {
  std::string out = "curve_id,x,y\n";
  char buf[96];
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (Index i = 0; i < curves[c].x.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", c, curves[c].x(i, 0), curves[c].y(i, 0));
      out += buf;
    }
  }
  return out;
}

}  // namespace nplab::data
