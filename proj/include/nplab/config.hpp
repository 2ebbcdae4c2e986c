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

// Experiment configuration. A config is a JSON document with sections
// {model, task, train, eval} plus output_dir and seed. A named profile
// supplies every default; a user document may only override keys the
// profile already has (unknown keys are rejected). The resolved document is
// what gets hashed into checkpoints and echoed next to the outputs.

#ifndef NPLAB_CONFIG_HPP
#define NPLAB_CONFIG_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "nplab/experiments.hpp"
#include "nplab/train.hpp"

namespace nplab {

/// "synthetic-e1", "cartpole-e2", "multiout-e3", "classification".
std::vector<std::string> profile_names();
/// Throws ConfigError for an unknown profile.
nlohmann::json profile_defaults(const std::string& profile);

struct EvalSettings {
  int k = 10;
  int s = 10;
  Index realizations = 200;
  Index n_context = 0;  // 0: the task's own protocol
  Index cdf_grid = 101;
  std::string convention = "both";  // J, P or both
};

struct CsvTaskSettings {
  std::string path;
  Index dx = 0;
  Index dy = 0;
  data::CsvOptions options;
};

class ExperimentConfig {
 public:
  /// Profile defaults overlaid with `overrides` (an object, possibly
  /// empty). If `overrides` has a "profile" key it selects the base profile.
  static ExperimentConfig resolve(const nlohmann::json& overrides, const std::string& profile = "synthetic-e1");
  static ExperimentConfig from_file(const std::string& path, const std::string& profile = "synthetic-e1");

  /// Sets a dotted key ("train.lr") from command-line text, parsed as JSON
  /// when possible and as a string otherwise. Unknown keys throw.
  void set(const std::string& dotted_key, const std::string& value);
  void set_json(const std::string& dotted_key, const nlohmann::json& value);

  const nlohmann::json& document() const { return doc_; }
  std::string dump() const { return doc_.dump(2) + "\n"; }
  /// FNV-1a of the resolved document without output_dir and eval: the part
  /// that determines a training run.
  std::string hash() const;

  const std::string& profile() const { return profile_; }
  std::string task() const;
  Variant variant() const;
  std::uint64_t seed() const;
  std::string output_dir() const;

  ModelDims dims() const;
  TrainConfig train() const;
  EvalSettings eval() const;

  experiments::SyntheticProtocol synthetic() const;
  data::OsbandConfig osband() const;
  experiments::CartpoleProtocol cartpole() const;
  experiments::ClassificationProtocol classification() const;
  CsvTaskSettings csv() const;
  Index batch_size() const;
  Index n_max() const;
  Index n_curves() const;

  /// Checks every typed view once; throws ConfigError.
  void validate() const;

 private:
  nlohmann::json doc_;
  std::string profile_;
};

}  // namespace nplab

#endif  // NPLAB_CONFIG_HPP
