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

#include "nplab/train.hpp"

#include <cmath>
#include <limits>

namespace nplab {

namespace {
constexpr std::uint64_t kTaskStream = 0x7a5c;
constexpr std::uint64_t kNoiseStream = 0x0153;
constexpr std::uint64_t kEvalTaskStream = 0xe7a1;
constexpr std::uint64_t kEvalNoiseStream = 0xe7a2;
}  // namespace

void TrainConfig::validate() const {
  if (iterations < 0 || tasks_per_step < 1 || k < 1 || s < 1 || eval_every < 1 || eval_batches < 1 ||
      patience < 1) {
    throw ConfigError("train: counts must be positive");
  }
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be finite and >= 0");
  if (!(kl.local >= 0.0) || !(kl.global >= 0.0)) throw ConfigError("train: KL weights must be >= 0");
}

LossEstimate held_out_loss(const NpModel& model, const TaskSampler& sampler, const KlWeights& kl, int n,
                           std::uint64_t seed) {
  Rng task_rng = make_rng(seed, kEvalTaskStream);
  Rng noise_rng = make_rng(seed, kEvalNoiseStream);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const ContextTargetBatch b = sampler(task_rng);
    const NoiseSet eps = draw_noise(model, b.num_target(), 1, 1, noise_rng);
    const double l = evaluate_loss(model, b, eps, kl);
    sum += l;
    sum_sq += l * l;
  }
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

TrainResult train(NpModel& model, const TaskSampler& sampler, const TrainConfig& cfg,
                  const std::function<void(const TraceRow&)>& on_trace) {
  cfg.validate();
  Rng task_rng = make_rng(cfg.seed, kTaskStream);
  Rng noise_rng = make_rng(cfg.seed, kNoiseStream);
  AdamState adam;
  adam.options.lr = cfg.lr;

  TrainResult result;
  double window_sum = 0.0;
  std::int64_t window_n = 0;
  double best = std::numeric_limits<double>::infinity();
  ParameterSet best_params;
  int since_best = 0;

  for (std::int64_t it = 1; it <= cfg.iterations; ++it) {
    std::vector<ContextTargetBatch> tasks;
    std::vector<NoiseSet> noise;
    tasks.reserve(static_cast<std::size_t>(cfg.tasks_per_step));
    for (int j = 0; j < cfg.tasks_per_step; ++j) {
      tasks.push_back(sampler(task_rng));
      noise.push_back(draw_noise(model, tasks.back().num_target(), cfg.k, cfg.s, noise_rng));
    }
    ParameterSet before = model.params;
    try {
      LossAndGradients lg = loss_and_gradients(model, tasks, noise, cfg.kl);
      if (cfg.lr > 0.0) adam_step(model.params, lg.gradients, adam);
      for (const auto& [name, p] : model.params) {
        if (!p.allFinite()) throw NumericError("parameter '" + name + "' is not finite");
      }
      window_sum += lg.loss;
      ++window_n;
    } catch (const NumericError& e) {
      model.params = std::move(before);
      throw TrainingAborted(e.what(), it, model);
    }
    result.iterations_run = it;

    if (it % cfg.eval_every == 0 || it == cfg.iterations) {
      const LossEstimate ev = held_out_loss(model, sampler, cfg.kl, cfg.eval_batches, cfg.seed);
      TraceRow row{it, window_sum / static_cast<double>(window_n), ev.mean, ev.se};
      window_sum = 0.0;
      window_n = 0;
      result.trace.push_back(row);
      if (on_trace) on_trace(row);
      if (cfg.early_stopping) {
        if (ev.mean < best) {
          best = ev.mean;
          best_params = model.params;
          since_best = 0;
        } else if (++since_best >= cfg.patience) {
          model.params = best_params;
          result.stopped_early = true;
          break;
        }
      }
    }
  }
  if (cfg.early_stopping && !best_params.empty() && !result.stopped_early) model.params = best_params;
  return result;
}

}  // namespace nplab
