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

// End-to-end commands on top of a resolved ExperimentConfig: data
// generation, training runs that write a self-describing directory, and
// evaluation that emits metric rows and CDF tables.

#ifndef NPLAB_RUNNER_HPP
#define NPLAB_RUNNER_HPP

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nplab/config.hpp"

namespace nplab {

using LogFn = std::function<void(const std::string&)>;

/// Training-task sampler for the configured task and variant. Task data
/// that needs generating (cart-pole trajectories, csv loading) is built
/// from the config seed.
TaskSampler make_task_sampler(const ExperimentConfig& cfg, Variant v);

struct TrainRun {
  NpModel model;
  TrainResult result;
};

/// Trains from scratch, writing config.resolved.json, checkpoint.json and
/// trace.csv into output_dir. On a numeric abort the last good parameters
/// are saved to checkpoint.last_good.json and the TrainingAborted rethrown.
TrainRun run_training(const ExperimentConfig& cfg, const LogFn& log = {});

std::string trace_to_csv(const std::vector<TraceRow>& trace);

struct EvalOptions {
  bool joint = true;
  bool points = true;
  std::string cdf_dir;  // empty: no CDF tables
};

/// Metric rows {metric, value, variance, n_seeds, convention}. With several
/// models (one per seed) value is their mean and variance the spread.
nlohmann::json run_evaluation(const std::vector<NpModel>& models, const ExperimentConfig& cfg,
                              const EvalOptions& opt, const LogFn& log = {});

/// Writes the task's data files and a manifest.json into out_dir.
nlohmann::json generate_data(const ExperimentConfig& cfg, const std::string& out_dir);

/// Draws n GP prior curves (warped if asked) on the configured grid as CSV.
std::string gp_sample_csv(const ExperimentConfig& cfg, Index n, bool warped);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace nplab

#endif  // NPLAB_RUNNER_HPP
