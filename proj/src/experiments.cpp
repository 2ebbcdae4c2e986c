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

#include "nplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nplab/data/batch.hpp"
#include "nplab/errors.hpp"

namespace nplab::experiments {

namespace {

std::vector<Index> sample_without_replacement(Index n, Index k, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

TaskSampler synthetic_sampler(std::shared_ptr<const data::SpCurveTask> task, const SyntheticProtocol& p,
                              Variant v) {
  return [task = std::move(task), p, v](Rng& rng) {
    const data::Curve c = task->restrict_to_train(task->sample(rng));
    return data::make_batch(c.x, c.y, std::min<Index>(p.batch_size, c.x.rows()), p.n_max, v, rng);
  };
}

std::vector<EvalRealization> synthetic_eval_set(const data::SpCurveTask& task, const SyntheticProtocol& p,
                                                bool extrapolation, Index n_realizations, Rng& rng) {
  std::vector<EvalRealization> out;
  out.reserve(static_cast<std::size_t>(n_realizations));
  for (Index i = 0; i < n_realizations; ++i) {
    data::Curve c = task.sample(rng);
    if (!extrapolation) c = task.restrict_to_train(c);
    const Index cap = std::min(extrapolation ? p.extrap_n_max : p.interp_n_max, c.x.rows() - 1);
    std::uniform_int_distribution<Index> nc(1, cap);
    const Index n = nc(rng);
    out.push_back({c.x, c.y, sample_without_replacement(c.x.rows(), n, rng)});
  }
  return out;
}

double context_free_nll(const std::vector<EvalRealization>& set, double prior_var) {
  double total = 0.0;
  Index n = 0;
  for (const auto& r : set) {
    std::vector<char> ctx(static_cast<std::size_t>(r.x.rows()), 0);
    for (Index i : r.context_rows) ctx[static_cast<std::size_t>(i)] = 1;
    double acc = 0.0;
    Index m = 0;
    for (Index i = 0; i < r.x.rows(); ++i) {
      if (ctx[static_cast<std::size_t>(i)]) continue;
      const double x = r.x(i, 0);
      const double mu = data::warped_mean(x, prior_var);
      const double var = data::warped_second_moment(x, prior_var) - mu * mu;
      const double z = r.y(i, 0) - mu;
      acc += 0.5 * std::log(2.0 * M_PI * var) + 0.5 * z * z / var;
      ++m;
    }
    if (m > 0) {
      total += acc / static_cast<double>(m);
      ++n;
    }
  }
  return total / static_cast<double>(n);
}

Index CartpoleData::train_rows() const {
  Index n = 0;
  for (const auto& b : train_x) n += b.rows();
  return n;
}

CartpoleData make_cartpole_data(const CartpoleProtocol& p, std::uint64_t seed) {
  const data::TrajectoryDataset tr =
      data::generate_trajectories(data::cartpole_train_configs(p.base), p.n_traj, p.horizon, seed);
  const data::TrajectoryDataset te =
      data::generate_trajectories(data::cartpole_test_configs(p.base), p.n_traj, p.horizon, seed ^ 0x7e57ULL);
  CartpoleData d;
  Matrix all_x, all_y;
  tr.all_matrices(all_x, all_y);
  d.x_stats = data::ColumnStats::fit(all_x);
  d.y_stats = data::ColumnStats::fit(all_y);
  auto split = [&](const data::TrajectoryDataset& ds, std::vector<Matrix>& xs, std::vector<Matrix>& ys) {
    for (std::size_t e = 0; e < ds.configs.size(); ++e) {
      Matrix x, y;
      ds.env_matrices(static_cast<int>(e), x, y);
      xs.push_back(d.x_stats.apply(x));
      ys.push_back(d.y_stats.apply(y));
    }
  };
  split(tr, d.train_x, d.train_y);
  split(te, d.test_x, d.test_y);
  return d;
}

TaskSampler cartpole_sampler(std::shared_ptr<const CartpoleData> d, const CartpoleProtocol& p, Variant v) {
  return [d = std::move(d), p, v](Rng& rng) {
    std::uniform_int_distribution<std::size_t> env(0, d->train_x.size() - 1);
    const std::size_t e = env(rng);
    return data::make_batch(d->train_x[e], d->train_y[e], p.batch_size, p.n_max, v, rng);
  };
}

std::vector<EvalRealization> cartpole_eval_set(const CartpoleData& d, const CartpoleProtocol& p, Rng& rng) {
  std::vector<EvalRealization> out;
  for (std::size_t e = 0; e < d.test_x.size(); ++e) {
    const Index n = d.test_x[e].rows();
    out.push_back({d.test_x[e], d.test_y[e], sample_without_replacement(n, std::min(p.eval_context, n - 1), rng)});
  }
  return out;
}

TaskSampler classification_sampler(std::shared_ptr<const data::ToyClassification> task,
                                   const ClassificationProtocol& p, Variant v) {
  return [task = std::move(task), p, v](Rng& rng) {
    Matrix x, y;
    task->sample(p.batch_size, rng, x, y);
    return data::make_batch(x, y, p.batch_size, p.n_max, v, rng);
  };
}

EntropySets classification_entropies(const NpModel& model, const data::ToyClassification& task,
                                     const ClassificationProtocol& p, int k, int s, Rng& rng) {
  Matrix xc, yc, xq, yq;
  task.sample(p.eval_context, rng, xc, yc);
  task.sample(p.eval_queries, rng, xq, yq);
  const Matrix ood_u = task.ood_uniform(p.eval_queries, rng);
  const Matrix ood_b = task.ood_blob(p.eval_queries, rng);
  EntropySets out;
  out.in_distribution = predictive_entropies(predict_class_probs(model, xc, yc, xq, k, s, rng));
  out.ood_uniform = predictive_entropies(predict_class_probs(model, xc, yc, ood_u, k, s, rng));
  out.ood_blob = predictive_entropies(predict_class_probs(model, xc, yc, ood_b, k, s, rng));
  return out;
}

ModelDims synthetic_dims() {
  ModelDims d;
  d.dim_lat = 128;
  d.dim_latx = 32;
  d.dim_laty = 32;
  d.encoder_hidden = {32, 32};
  d.decoder_hidden = {128, 128};
  return d;
}

ModelDims cartpole_dims() {
  ModelDims d;
  d.dx = 5;
  d.dy = 4;
  d.dim_lat = 32;
  d.dim_latx = 32;
  d.dim_laty = 32;
  d.encoder_hidden = {32, 32};
  d.decoder_hidden = {400, 400};
  return d;
}

ModelDims classification_dims(Index classes) {
  ModelDims d;
  d.dx = 2;
  d.dy = classes;
  d.dim_lat = 32;
  d.dim_latx = 32;
  d.dim_laty = 32;
  d.encoder_hidden = {64, 64};
  d.decoder_hidden = {64};
  d.likelihood = Likelihood::categorical;
  return d;
}

}  // namespace nplab::experiments
