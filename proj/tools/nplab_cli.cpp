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

// nplab_cli: gen-data | train | eval | gp-sample
//
// Exit codes: 0 success, 2 usage or config error, 3 I/O or checkpoint load
// error, 4 numeric abort during training.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nplab/checkpoint.hpp"
#include "nplab/errors.hpp"
#include "nplab/runner.hpp"

namespace {

using nplab::ExperimentConfig;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
  std::string profile = "synthetic-e1";
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string task;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--profile", f.profile, "Defaults profile: synthetic-e1, cartpole-e2, multiout-e3, classification");
  cmd->add_option("--config", f.config_path, "JSON config overriding the profile");
  cmd->add_option("--set", f.sets, "Override one key, e.g. --set train.lr=1e-3 (repeatable)");
  cmd->add_option("--seed", f.seed, "Seed (beats the config and NPLAB_SEED)");
  cmd->add_option("--output-dir", f.output_dir, "Run directory");
  cmd->add_option("--task", f.task, "sp1d | osband | cartpole | csv | classification");
}

void log_line(const std::string& s) { std::cerr << s << "\n"; }

ExperimentConfig resolve(const CommonFlags& f, const std::string& fallback_config = {}) {
  const std::string path = f.config_path.empty() ? fallback_config : f.config_path;
  ExperimentConfig cfg = path.empty() ? ExperimentConfig::resolve(nlohmann::json::object(), f.profile)
                                      : ExperimentConfig::from_file(path, f.profile);
  if (!f.task.empty()) cfg.set_json("task.name", f.task);
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw nplab::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (const char* env = std::getenv("NPLAB_SEED"); env != nullptr && *env != '\0') {
    try {
      cfg.set_json("seed", std::stoull(env));
    } catch (const std::logic_error&) {
      throw nplab::ConfigError(std::string("NPLAB_SEED is not a non-negative integer: '") + env + "'");
    }
  }
  if (f.seed) cfg.set_json("seed", *f.seed);
  if (!f.output_dir.empty()) cfg.set_json("output_dir", f.output_dir);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural process family: data generation, training and evaluation"};
  app.require_subcommand(1);

  CommonFlags gen_f, train_f, eval_f, gp_f;

  auto* gen = app.add_subcommand("gen-data", "Write a task's data files and a manifest");
  add_common(gen, gen_f);
  std::string gen_out;
  std::optional<long long> n_curves;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--n-curves", n_curves, "Number of sp1d curves");

  auto* tr = app.add_subcommand("train", "Train one model; writes checkpoint, trace and resolved config");
  add_common(tr, train_f);
  std::string model_name;
  std::optional<long long> iters;
  std::optional<double> lr;
  tr->add_option("--model", model_name, "cnp | np | attnnp | dsvnp");
  tr->add_option("--iters", iters, "Training iterations");
  tr->add_option("--lr", lr, "Adam learning rate");

  auto* ev = app.add_subcommand("eval", "Evaluate checkpoints (one per seed) on the configured task");
  add_common(ev, eval_f);
  std::vector<std::string> checkpoints;
  std::string convention;
  bool both = false;
  std::string metrics_out, cdf_dir;
  ev->add_option("--checkpoint", checkpoints, "Checkpoint file (repeat for several seeds)")->required();
  ev->add_option("--convention", convention, "J (all points) or P (non-context points)")
      ->check(CLI::IsMember({"J", "P"}));
  ev->add_flag("--both-conventions", both, "Report J and P rows");
  ev->add_option("--out", metrics_out, "Metrics JSON path (default <output_dir>/metrics.json)");
  ev->add_option("--cdf-dir", cdf_dir, "Directory for entropy CDF tables");

  auto* gp = app.add_subcommand("gp-sample", "Sample GP prior curves on the configured grid");
  add_common(gp, gp_f);
  long long gp_n = 10;
  std::string gp_out;
  bool warped = false;
  gp->add_option("--n", gp_n, "Number of curves");
  gp->add_option("--out", gp_out, "CSV path (default stdout)");
  gp->add_flag("--warped", warped, "Apply y = sin(f(x) + x)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      ExperimentConfig cfg = resolve(gen_f);
      if (n_curves) cfg.set_json("task.sp1d.n_curves", *n_curves);
      const auto manifest = nplab::generate_data(cfg, gen_out);
      std::cout << manifest.dump(2) << "\n";
    } else if (tr->parsed()) {
      ExperimentConfig cfg = resolve(train_f);
      if (!model_name.empty()) cfg.set_json("model.variant", model_name);
      if (iters) cfg.set_json("train.iterations", *iters);
      if (lr) cfg.set_json("train.lr", *lr);
      nplab::run_training(cfg, log_line);
      std::cerr << "wrote " << cfg.output_dir() << "/{config.resolved.json,checkpoint.json,trace.csv}\n";
    } else if (ev->parsed()) {
      // a checkpoint written by `train` sits next to the config that produced it
      std::string sibling;
      const auto dir = std::filesystem::path(checkpoints.front()).parent_path();
      if (std::filesystem::exists(dir / "config.resolved.json")) sibling = (dir / "config.resolved.json").string();
      const ExperimentConfig cfg = resolve(eval_f, sibling);
      std::vector<nplab::NpModel> models;
      for (const std::string& path : checkpoints) {
        models.push_back(nplab::load_checkpoint(path, cfg.hash(), [](const std::string& w) {
                           std::cerr << "warning: " << w << "\n";
                         }).model);
      }
      nplab::EvalOptions opt;
      if (!both) {
        const std::string c = convention.empty() ? cfg.eval().convention : convention;
        opt.joint = c == "J" || c == "both";
        opt.points = c == "P" || c == "both";
      }
      opt.cdf_dir = cdf_dir;
      const auto rows = nplab::run_evaluation(models, cfg, opt, log_line);
      const std::string text = rows.dump(2) + "\n";
      nplab::write_text_file(metrics_out.empty() ? cfg.output_dir() + "/metrics.json" : metrics_out, text);
      std::cout << text;
    } else if (gp->parsed()) {
      const ExperimentConfig cfg = resolve(gp_f);
      const std::string csv = nplab::gp_sample_csv(cfg, gp_n, warped);
      if (gp_out.empty()) {
        std::cout << csv;
      } else {
        nplab::write_text_file(gp_out, csv);
      }
    }
  } catch (const nplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nplab::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nplab::ParseError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nplab::DimensionError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nplab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
