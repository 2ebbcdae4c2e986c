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

#include "nplab/config.hpp"

#include <fstream>
#include <sstream>

#include "nplab/checkpoint.hpp"
#include "nplab/errors.hpp"

namespace nplab {

using nlohmann::json;

namespace {

json base_defaults() {
  return json::parse(R"({
  "seed": 0,
  "output_dir": "runs/default",
  "model": {
    "variant": "dsvnp",
    "dim_lat": 128, "dim_latx": 32, "dim_laty": 32,
    "encoder_hidden": [32, 32], "decoder_hidden": [128, 128],
    "loss_mode": "nll"
  },
  "task": {
    "name": "sp1d",
    "batch_size": 100,
    "n_max": 50,
    "sp1d": {
      "grid_min": -2.0, "grid_max": 2.0, "grid_points": 400,
      "train_min": -1.0, "train_max": 1.0,
      "n_curves": 2000, "interp_n_max": 50, "extrap_n_max": 200,
      "kernel": {"length_scale": 0.4, "signal_std": 1.0, "jitter": 1e-6}
    },
    "osband": {"noise_std": 0.003, "eval_min": -0.5, "eval_max": 1.5, "eval_points": 200},
    "cartpole": {
      "pole_mass": 0.5, "pole_length": 0.6, "gravity": 9.81, "dt": 0.1, "force_max": 10.0,
      "substeps": 50, "n_traj": 400, "horizon": 10, "eval_context": 100
    },
    "csv": {"path": "", "dx": 0, "dy": 0, "has_header": false, "train_fraction": 0.5, "eval_context": 30},
    "classification": {"blob_std": 0.6, "eval_context": 100, "eval_queries": 500}
  },
  "train": {
    "iterations": 100000, "tasks_per_step": 4, "lr": 5e-4, "k": 1, "s": 1,
    "kl_weight_global": 1.0, "kl_weight_local": 1.0,
    "eval_every": 1000, "eval_batches": 100, "early_stopping": false, "patience": 10
  },
  "eval": {"k": 10, "s": 10, "realizations": 200, "n_context": 0, "cdf_grid": 101, "convention": "both"}
})");
}

// Values from the architecture and hyperparameter tables of each experiment.
json profile_patch(const std::string& name) {
  if (name == "synthetic-e1") {
    return json::parse(R"({"output_dir": "runs/synthetic-e1", "train": {"kl_weight_local": 1000.0}})");
  }
  if (name == "cartpole-e2") {
    return json::parse(R"({
      "output_dir": "runs/cartpole-e2",
      "model": {"dim_lat": 32, "dim_latx": 32, "dim_laty": 32, "encoder_hidden": [32, 32],
                "decoder_hidden": [400, 400]},
      "task": {"name": "cartpole", "batch_size": 100, "n_max": 100},
      "train": {"iterations": 24000, "tasks_per_step": 1, "lr": 1e-3,
                "kl_weight_local": 1.0, "kl_weight_global": 5.0, "eval_every": 1000, "eval_batches": 50}
    })");
  }
  if (name == "multiout-e3") {
    return json::parse(R"({
      "output_dir": "runs/multiout-e3",
      "model": {"dim_lat": 64, "dim_latx": 32, "dim_laty": 8, "encoder_hidden": [100, 100],
                "decoder_hidden": [100, 100], "loss_mode": "mse"},
      "task": {"name": "csv", "batch_size": 100, "n_max": 99},
      "train": {"iterations": 20000, "tasks_per_step": 1, "lr": 1e-3, "eval_every": 1000, "eval_batches": 50}
    })");
  }
  if (name == "classification") {
    return json::parse(R"({
      "output_dir": "runs/classification",
      "model": {"dim_lat": 32, "dim_latx": 32, "dim_laty": 32, "encoder_hidden": [64, 64],
                "decoder_hidden": [64], "loss_mode": "categorical"},
      "task": {"name": "classification", "batch_size": 100, "n_max": 99},
      "train": {"iterations": 3000, "tasks_per_step": 1, "lr": 1e-3, "eval_every": 500, "eval_batches": 20}
    })");
  }
  std::string known;
  for (const auto& p : profile_names()) known += (known.empty() ? "" : "|") + p;
  throw ConfigError("unknown profile '" + name + "' (expected " + known + ")");
}

bool compatible(const json& def, const json& v) {
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_array()) return v.is_array();
  return def.type() == v.type();
}

// Overlays `patch` onto `doc`, refusing keys `doc` lacks and type changes.
void overlay(json& doc, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config" + where + ": expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!doc.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& slot = doc[it.key()];
    if (slot.is_object()) {
      overlay(slot, it.value(), key);
    } else {
      if (!compatible(slot, it.value())) {
        throw ConfigError("config key '" + key + "' expects " + std::string(slot.type_name()) + ", got " +
                          it.value().type_name());
      }
      slot = it.value();
    }
  }
}

template <typename T>
T get(const json& doc, const char* section, const char* key) {
  try {
    return doc.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + section + "." + key + "': " + e.what());
  }
}

const json& task_section(const json& doc, const char* name) { return doc.at("task").at(name); }

}  // namespace

std::vector<std::string> profile_names() { return {"synthetic-e1", "cartpole-e2", "multiout-e3", "classification"}; }

json profile_defaults(const std::string& profile) {
  json doc = base_defaults();
  overlay(doc, profile_patch(profile), "");
  return doc;
}

ExperimentConfig ExperimentConfig::resolve(const json& overrides, const std::string& profile) {
  json patch = overrides.is_null() ? json::object() : overrides;
  if (!patch.is_object()) throw ConfigError("config: top level must be an object");
  std::string name = profile;
  if (patch.contains("profile")) {
    if (!patch["profile"].is_string()) throw ConfigError("config key 'profile' expects a string");
    name = patch["profile"].get<std::string>();
    patch.erase("profile");
  }
  ExperimentConfig c;
  c.profile_ = name;
  c.doc_ = profile_defaults(name);
  overlay(c.doc_, patch, "");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path, const std::string& profile) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return resolve(doc, profile);
}

void ExperimentConfig::set_json(const std::string& dotted_key, const json& value) {
  json patch = value;
  std::string key = dotted_key;
  for (auto pos = key.rfind('.'); pos != std::string::npos; pos = key.rfind('.')) {
    patch = json{{key.substr(pos + 1), patch}};
    key.resize(pos);
  }
  patch = json{{key, patch}};
  json next = doc_;
  overlay(next, patch, "");
  std::swap(doc_, next);
  try {
    validate();
  } catch (...) {
    std::swap(doc_, next);
    throw;
  }
}

void ExperimentConfig::set(const std::string& dotted_key, const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  set_json(dotted_key, v);
}

std::string ExperimentConfig::hash() const {
  json d = doc_;
  d.erase("output_dir");
  d.erase("eval");
  return hex64(fnv1a64(d.dump()));
}

std::string ExperimentConfig::task() const { return doc_.at("task").at("name").get<std::string>(); }
Variant ExperimentConfig::variant() const { return parse_variant(get<std::string>(doc_, "model", "variant")); }
std::uint64_t ExperimentConfig::seed() const {
  if (!doc_.at("seed").is_number_unsigned() && doc_.at("seed").get<long long>() < 0) {
    throw ConfigError("config key 'seed' must be non-negative");
  }
  return doc_.at("seed").get<std::uint64_t>();
}
std::string ExperimentConfig::output_dir() const { return doc_.at("output_dir").get<std::string>(); }

ModelDims ExperimentConfig::dims() const {
  ModelDims d;
  d.dim_lat = get<Index>(doc_, "model", "dim_lat");
  d.dim_latx = get<Index>(doc_, "model", "dim_latx");
  d.dim_laty = get<Index>(doc_, "model", "dim_laty");
  d.encoder_hidden = get<std::vector<Index>>(doc_, "model", "encoder_hidden");
  d.decoder_hidden = get<std::vector<Index>>(doc_, "model", "decoder_hidden");
  const std::string mode = get<std::string>(doc_, "model", "loss_mode");
  d.likelihood = parse_likelihood(mode);
  const std::string t = task();
  if (t == "sp1d" || t == "osband") {
    d.dx = d.dy = 1;
  } else if (t == "cartpole") {
    d.dx = 5;
    d.dy = 4;
  } else if (t == "classification") {
    d.dx = 2;
    d.dy = classification().blobs.centres.rows();
  } else if (t == "csv") {
    d.dx = csv().dx;
    d.dy = csv().dy;
  } else {
    throw ConfigError("unknown task '" + t + "' (expected sp1d|osband|cartpole|csv|classification)");
  }
  return d;
}

TrainConfig ExperimentConfig::train() const {
  TrainConfig t;
  t.iterations = get<std::int64_t>(doc_, "train", "iterations");
  t.tasks_per_step = get<int>(doc_, "train", "tasks_per_step");
  t.lr = get<double>(doc_, "train", "lr");
  t.k = get<int>(doc_, "train", "k");
  t.s = get<int>(doc_, "train", "s");
  t.kl.global = get<double>(doc_, "train", "kl_weight_global");
  t.kl.local = get<double>(doc_, "train", "kl_weight_local");
  t.eval_every = get<std::int64_t>(doc_, "train", "eval_every");
  t.eval_batches = get<int>(doc_, "train", "eval_batches");
  t.early_stopping = get<bool>(doc_, "train", "early_stopping");
  t.patience = get<int>(doc_, "train", "patience");
  t.seed = seed();
  return t;
}

EvalSettings ExperimentConfig::eval() const {
  EvalSettings e;
  e.k = get<int>(doc_, "eval", "k");
  e.s = get<int>(doc_, "eval", "s");
  e.realizations = get<Index>(doc_, "eval", "realizations");
  e.n_context = get<Index>(doc_, "eval", "n_context");
  e.cdf_grid = get<Index>(doc_, "eval", "cdf_grid");
  e.convention = get<std::string>(doc_, "eval", "convention");
  return e;
}

Index ExperimentConfig::batch_size() const { return get<Index>(doc_, "task", "batch_size"); }
Index ExperimentConfig::n_max() const { return get<Index>(doc_, "task", "n_max"); }
Index ExperimentConfig::n_curves() const { return task_section(doc_, "sp1d").at("n_curves").get<Index>(); }

experiments::SyntheticProtocol ExperimentConfig::synthetic() const {
  const json& s = task_section(doc_, "sp1d");
  experiments::SyntheticProtocol p;
  p.curves.grid_lo = s.at("grid_min").get<double>();
  p.curves.grid_hi = s.at("grid_max").get<double>();
  p.curves.grid_points = s.at("grid_points").get<Index>();
  p.curves.train_lo = s.at("train_min").get<double>();
  p.curves.train_hi = s.at("train_max").get<double>();
  p.curves.kernel.length_scale = s.at("kernel").at("length_scale").get<double>();
  p.curves.kernel.signal_std = s.at("kernel").at("signal_std").get<double>();
  p.curves.kernel.jitter = s.at("kernel").at("jitter").get<double>();
  p.batch_size = batch_size();
  p.n_max = n_max();
  p.interp_n_max = s.at("interp_n_max").get<Index>();
  p.extrap_n_max = s.at("extrap_n_max").get<Index>();
  return p;
}

data::OsbandConfig ExperimentConfig::osband() const {
  const json& s = task_section(doc_, "osband");
  data::OsbandConfig c;
  c.noise_std = s.at("noise_std").get<double>();
  c.eval_lo = s.at("eval_min").get<double>();
  c.eval_hi = s.at("eval_max").get<double>();
  c.eval_points = s.at("eval_points").get<Index>();
  return c;
}

experiments::CartpoleProtocol ExperimentConfig::cartpole() const {
  const json& s = task_section(doc_, "cartpole");
  experiments::CartpoleProtocol p;
  p.base.pole_mass = s.at("pole_mass").get<double>();
  p.base.pole_length = s.at("pole_length").get<double>();
  p.base.gravity = s.at("gravity").get<double>();
  p.base.dt = s.at("dt").get<double>();
  p.base.force_max = s.at("force_max").get<double>();
  p.base.substeps = s.at("substeps").get<int>();
  p.n_traj = s.at("n_traj").get<int>();
  p.horizon = s.at("horizon").get<int>();
  p.eval_context = s.at("eval_context").get<Index>();
  p.batch_size = batch_size();
  p.n_max = n_max();
  return p;
}

experiments::ClassificationProtocol ExperimentConfig::classification() const {
  const json& s = task_section(doc_, "classification");
  experiments::ClassificationProtocol p;
  p.blobs.blob_std = s.at("blob_std").get<double>();
  p.eval_context = s.at("eval_context").get<Index>();
  p.eval_queries = s.at("eval_queries").get<Index>();
  p.batch_size = batch_size();
  p.n_max = n_max();
  return p;
}

CsvTaskSettings ExperimentConfig::csv() const {
  const json& s = task_section(doc_, "csv");
  CsvTaskSettings c;
  c.path = s.at("path").get<std::string>();
  c.dx = s.at("dx").get<Index>();
  c.dy = s.at("dy").get<Index>();
  c.options.has_header = s.at("has_header").get<bool>();
  c.options.train_fraction = s.at("train_fraction").get<double>();
  c.options.split_seed = seed();
  return c;
}

void ExperimentConfig::validate() const {
  try {
    (void)seed();
    (void)variant();
    const ModelDims d = dims();
    const TrainConfig t = train();
    t.validate();
    const EvalSettings e = eval();
    if (e.k < 1 || e.s < 1 || e.realizations < 1 || e.n_context < 0 || e.cdf_grid < 2) {
      throw ConfigError("eval: k, s, realizations must be >= 1, cdf_grid >= 2, n_context >= 0");
    }
    if (e.convention != "J" && e.convention != "P" && e.convention != "both") {
      throw ConfigError("eval.convention must be J, P or both");
    }
    if (batch_size() < 2 || n_max() < 1 || n_max() > batch_size()) {
      throw ConfigError("task: need batch_size >= 2 and 1 <= n_max <= batch_size");
    }
    const std::string t_name = task();
    if ((t_name == "classification") != (d.likelihood == Likelihood::categorical)) {
      throw ConfigError("model.loss_mode 'categorical' goes with task 'classification' and only with it");
    }
    if (t_name == "csv" && (csv().dx < 1 || csv().dy < 1)) {
      throw ConfigError("task.csv: dx and dy must be set (>= 1) for the csv task");
    }
    if (d.dim_lat < 1 || d.dim_latx < 1 || d.dim_laty < 1) throw ConfigError("model: widths must be >= 1");
    for (Index h : d.encoder_hidden)
      if (h < 1) throw ConfigError("model.encoder_hidden: widths must be >= 1");
    for (Index h : d.decoder_hidden)
      if (h < 1) throw ConfigError("model.decoder_hidden: widths must be >= 1");
    synthetic().curves.kernel.validate();
    cartpole().base.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace nplab
