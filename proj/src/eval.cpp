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

#include "nplab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nplab/errors.hpp"

namespace nplab {

namespace {

Matrix take_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

std::vector<char> context_mask(const EvalRealization& r) {
  std::vector<char> mask(static_cast<std::size_t>(r.x.rows()), 0);
  for (Index i : r.context_rows) {
    if (i < 0 || i >= r.x.rows()) throw ContractError("eval: context row out of range");
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

void accumulate(std::vector<double>& xs, double& mean, double& se) {
  const MeanVar mv = mean_and_variance(xs);
  mean = mv.n > 0 ? mv.mean : std::numeric_limits<double>::quiet_NaN();
  se = mv.n > 1 ? std::sqrt(mv.variance / mv.n) : 0.0;
}

}  // namespace

std::string to_string(Convention c) { return c == Convention::joint ? "J" : "P"; }

Vector pointwise_nll(const NpModel& model, const EvalRealization& r, int k, int s, Rng& rng) {
  const Matrix xc = take_rows(r.x, r.context_rows), yc = take_rows(r.y, r.context_rows);
  const PredictiveMixture mix = predict(model, xc, yc, r.x, k, s, rng);
  return -mix.log_density(r.y);
}

NllResult eval_nll(const NpModel& model, const std::vector<EvalRealization>& set, int k, int s, Rng& rng) {
  NllResult out;
  out.joint_applicable = model.variant != Variant::cnp;
  std::vector<double> joint, points;
  for (const EvalRealization& r : set) {
    const std::vector<char> mask = context_mask(r);
    const Vector nll = pointwise_nll(model, r, k, s, rng);
    double all = 0.0, off = 0.0;
    Index n_off = 0;
    for (Index i = 0; i < nll.size(); ++i) {
      all += nll(i);
      if (!mask[static_cast<std::size_t>(i)]) {
        off += nll(i);
        ++n_off;
      }
    }
    joint.push_back(all / static_cast<double>(nll.size()));
    if (n_off > 0) points.push_back(off / static_cast<double>(n_off));
  }
  out.realizations = static_cast<Index>(set.size());
  accumulate(points, out.points, out.points_se);
  if (out.joint_applicable) {
    accumulate(joint, out.joint, out.joint_se);
  } else {
    out.joint = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double mse(const Matrix& prediction, const Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw DimensionError("mse: shape mismatch");
  }
  return (prediction - target).array().square().mean();
}

MseResult eval_mse(const NpModel& model, const std::vector<EvalRealization>& set) {
  const Index dy = model.dims.dy;
  RowVector sums = RowVector::Zero(dy);
  Index n = 0;
  for (const EvalRealization& r : set) {
    const std::vector<char> mask = context_mask(r);
    std::vector<Index> off;
    for (Index i = 0; i < r.x.rows(); ++i)
      if (!mask[static_cast<std::size_t>(i)]) off.push_back(i);
    if (off.empty()) continue;
    const Matrix xq = take_rows(r.x, off), yq = take_rows(r.y, off);
    const GaussianParams p =
        predict_deterministic(model, take_rows(r.x, r.context_rows), take_rows(r.y, r.context_rows), xq);
    sums += (p.mean - yq).array().square().matrix().colwise().sum();
    n += static_cast<Index>(off.size());
  }
  if (n == 0) throw ContractError("eval_mse: no non-context points");
  MseResult out;
  out.per_dimension = sums / static_cast<double>(n);
  out.mse = out.per_dimension.mean();
  return out;
}

double predictive_entropy(const RowVector& probs) {
  if (probs.size() < 1) throw ContractError("predictive_entropy: empty distribution");
  if ((probs.array() < 0.0).any() || std::abs(probs.sum() - 1.0) > 1e-6 || !probs.allFinite()) {
    throw ContractError("predictive_entropy: probabilities are not on the simplex");
  }
  double h = 0.0;
  for (Index c = 0; c < probs.size(); ++c)
    if (probs(c) > 0.0) h -= probs(c) * std::log(probs(c));
  return std::clamp(h, 0.0, std::log(static_cast<double>(probs.size())));
}

std::vector<double> predictive_entropies(const Matrix& probs) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(probs.rows()));
  for (Index i = 0; i < probs.rows(); ++i) out.push_back(predictive_entropy(probs.row(i)));
  return out;
}

std::vector<std::pair<double, double>> entropy_cdf(const std::vector<double>& entropies, Index grid_size,
                                                   double h_max) {
  if (entropies.empty()) throw ContractError("entropy_cdf: empty sample");
  if (grid_size < 2 || !(h_max > 0.0)) throw ContractError("entropy_cdf: need grid_size >= 2 and h_max > 0");
  std::vector<double> sorted(entropies);
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(sorted.size());
  for (Index i = 0; i < grid_size; ++i) {
    const double h = i == grid_size - 1 ? h_max : h_max * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), h) - sorted.begin();
    // entropies are clamped to [0, h_max], so the last point is always 1
    out.emplace_back(h, i == grid_size - 1 ? 1.0 : static_cast<double>(count) / n);
  }
  return out;
}

MeanVar mean_and_variance(const std::vector<double>& xs) {
  MeanVar mv;
  mv.n = static_cast<int>(xs.size());
  if (xs.empty()) return mv;
  double s = 0.0;
  for (double x : xs) s += x;
  mv.mean = s / mv.n;
  if (mv.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mv.mean) * (x - mv.mean);
    mv.variance = ss / (mv.n - 1);
  }
  return mv;
}

}  // namespace nplab
