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

// Task protocols shared by the command-line tool and the acceptance suite:
// how training tasks are sampled and how evaluation sets are built.

#ifndef NPLAB_EXPERIMENTS_HPP
#define NPLAB_EXPERIMENTS_HPP

#include <memory>
#include <vector>

#include "nplab/data/cartpole.hpp"
#include "nplab/data/classification.hpp"
#include "nplab/data/synthetic.hpp"
#include "nplab/eval.hpp"
#include "nplab/train.hpp"

namespace nplab::experiments {

// Warped-GP curves. Training tasks use the grid points inside the training
// interval; interpolation evaluation conditions on up to 50 of those and
// scores all of them, extrapolation conditions on up to 200 points of the
// whole grid and scores all 400.
struct SyntheticProtocol {
  data::SpCurveConfig curves;
  Index batch_size = 100;
  Index n_max = 50;
  Index interp_n_max = 50;
  Index extrap_n_max = 200;
};

TaskSampler synthetic_sampler(std::shared_ptr<const data::SpCurveTask> task, const SyntheticProtocol& p,
                              Variant v);
std::vector<EvalRealization> synthetic_eval_set(const data::SpCurveTask& task, const SyntheticProtocol& p,
                                                bool extrapolation, Index n_realizations, Rng& rng);

/// Gaussian per x with the exact moments of y = sin(f(x) + x): the best
/// predictor that ignores the context. Mean per-point NLL over `set`.
double context_free_nll(const std::vector<EvalRealization>& set, double prior_var);

// Cart-pole system identification. Inputs [state, action], outputs the next
// state, both standardised with statistics of the training environments.
struct CartpoleProtocol {
  data::CartPoleConfig base;
  int n_traj = 400;
  int horizon = 10;
  Index batch_size = 100;
  Index n_max = 100;
  Index eval_context = 100;
};

struct CartpoleData {
  std::vector<Matrix> train_x, train_y;  // one block per environment, standardised
  std::vector<Matrix> test_x, test_y;
  data::ColumnStats x_stats, y_stats;
  Index train_rows() const;
};

CartpoleData make_cartpole_data(const CartpoleProtocol& p, std::uint64_t seed);
/// One environment per task, uniformly chosen.
TaskSampler cartpole_sampler(std::shared_ptr<const CartpoleData> d, const CartpoleProtocol& p, Variant v);
/// One realisation per test environment with `eval_context` random rows as context.
std::vector<EvalRealization> cartpole_eval_set(const CartpoleData& d, const CartpoleProtocol& p, Rng& rng);

// Toy classification with categorical decoders.
struct ClassificationProtocol {
  data::BlobConfig blobs;
  Index batch_size = 100;
  Index n_max = 100;
  Index eval_context = 100;
  Index eval_queries = 500;
};

TaskSampler classification_sampler(std::shared_ptr<const data::ToyClassification> task,
                                   const ClassificationProtocol& p, Variant v);

struct EntropySets {
  std::vector<double> in_distribution;
  std::vector<double> ood_uniform;
  std::vector<double> ood_blob;
};

/// Entropies of the K*S-averaged class probabilities on each query set,
/// conditioning on `eval_context` labelled in-distribution points.
EntropySets classification_entropies(const NpModel& model, const data::ToyClassification& task,
                                     const ClassificationProtocol& p, int k, int s, Rng& rng);

/// Model dimensions matching each task's architecture table.
ModelDims synthetic_dims();
ModelDims cartpole_dims();
ModelDims classification_dims(Index classes);

}  // namespace nplab::experiments

#endif  // NPLAB_EXPERIMENTS_HPP
