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

// The stochastic-gradient training loop: each iteration draws fresh tasks,
// reparameterisation noise and one Adam step on the mean task loss.

#ifndef NPLAB_TRAIN_HPP
#define NPLAB_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nplab/adam.hpp"
#include "nplab/errors.hpp"
#include "nplab/objectives.hpp"

namespace nplab {

struct TrainConfig {
  std::int64_t iterations = 1000;
  int tasks_per_step = 1;
  double lr = 1e-3;
  int k = 1;
  int s = 1;
  KlWeights kl;
  std::uint64_t seed = 0;
  std::int64_t eval_every = 100;
  int eval_batches = 100;
  bool early_stopping = false;
  int patience = 10;

  void validate() const;
};

/// Draws one training task. The sampler owns its notion of batch size and
/// context count; the rng is the loop's task stream.
using TaskSampler = std::function<ContextTargetBatch(Rng&)>;

struct TraceRow {
  std::int64_t iteration = 0;
  double train_loss = 0.0;  // mean over the iterations since the last row
  double eval_loss = 0.0;
  double eval_loss_se = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  std::int64_t iterations_run = 0;
  bool stopped_early = false;
};

/// Raised when a loss or gradient turns non-finite. Carries the parameters
/// from before the failing step.
class TrainingAborted : public NumericError {
 public:
  TrainingAborted(const std::string& what, std::int64_t iteration, NpModel last_good)
      : NumericError(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration),
        last_good_(std::move(last_good)) {}
  std::int64_t iteration() const { return iteration_; }
  const NpModel& last_good() const { return last_good_; }

 private:
  std::int64_t iteration_;
  NpModel last_good_;
};

/// Mean and standard error of the loss over `n` held-out tasks drawn from a
/// stream fixed by `seed`, with fresh K = S = 1 noise from another fixed
/// stream. Repeated calls on the same model give identical results.
struct LossEstimate {
  double mean = 0.0;
  double se = 0.0;
};
LossEstimate held_out_loss(const NpModel& model, const TaskSampler& sampler, const KlWeights& kl, int n,
                           std::uint64_t seed);

/// Trains `model` in place. Bit-reproducible given config.seed. With
/// early stopping the parameters at the best held-out loss are restored.
TrainResult train(NpModel& model, const TaskSampler& sampler, const TrainConfig& cfg,
                  const std::function<void(const TraceRow&)>& on_trace = {});

}  // namespace nplab

#endif  // NPLAB_TRAIN_HPP
