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

#include "nplab/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "nplab/checkpoint.hpp"
#include "nplab/data/batch.hpp"
#include "nplab/data/tabular.hpp"
#include "nplab/errors.hpp"
#include "nplab/gp.hpp"

namespace nplab {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEvalSetStream = 0xe1a1;
constexpr std::uint64_t kEvalPredictStream = 0xe1a2;
constexpr std::uint64_t kOsbandStream = 0x05ba;
constexpr std::uint64_t kGenStream = 0x6e11;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::vector<Index> pick_rows(Index n, Index k, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> d(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(d(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

data::TabularSplit load_csv_task(const ExperimentConfig& cfg) {
  const CsvTaskSettings c = cfg.csv();
  if (c.path.empty()) throw ConfigError("task.csv.path is empty");
  return data::load_csv(c.path, c.dx, c.dy, c.options);
}

data::TabularDataset osband_train(const ExperimentConfig& cfg) {
  Rng rng = make_rng(cfg.seed(), kOsbandStream);
  return data::osband_dataset(rng, cfg.osband());
}

// One row per metric; `values` holds one number per model (seed).
json metric_row(const std::string& metric, const std::vector<double>& values, const char* convention) {
  const MeanVar mv = mean_and_variance(values);
  json row = {{"metric", metric}, {"value", mv.mean}, {"variance", mv.variance}, {"n_seeds", mv.n}};
  row["convention"] = convention ? json(convention) : json(nullptr);
  return row;
}

json not_applicable_row(const std::string& metric, int n_seeds) {
  return {{"metric", metric}, {"value", nullptr},       {"variance", nullptr},
          {"n_seeds", n_seeds}, {"convention", "J"}, {"not_applicable", true}};
}

void nll_rows(json& rows, const std::string& name, const std::vector<NllResult>& per_model,
              const EvalOptions& opt) {
  std::vector<double> j, p;
  bool joint_ok = true;
  for (const NllResult& r : per_model) {
    j.push_back(r.joint);
    p.push_back(r.points);
    joint_ok = joint_ok && r.joint_applicable;
  }
  if (opt.joint) {
    rows.push_back(joint_ok ? metric_row(name, j, "J") : not_applicable_row(name, static_cast<int>(j.size())));
  }
  if (opt.points) rows.push_back(metric_row(name, p, "P"));
}

std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf) {
  std::string out = "h,cdf\n";
  for (const auto& [h, c] : cdf) out += fmt(h) + "," + fmt(c) + "\n";
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("error writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TaskSampler make_task_sampler(const ExperimentConfig& cfg, Variant v) {
  const std::string task = cfg.task();
  if (task == "sp1d") {
    const auto p = cfg.synthetic();
    return experiments::synthetic_sampler(std::make_shared<const data::SpCurveTask>(p.curves), p, v);
  }
  if (task == "osband") {
    auto ds = std::make_shared<const data::TabularDataset>(osband_train(cfg));
    const Index b = std::min(cfg.batch_size(), ds->size());
    const Index n_max = std::min(cfg.n_max(), b - 1);
    return [ds, b, n_max, v](Rng& rng) { return data::make_batch(*ds, b, n_max, v, rng); };
  }
  if (task == "cartpole") {
    const auto p = cfg.cartpole();
    return experiments::cartpole_sampler(
        std::make_shared<const experiments::CartpoleData>(experiments::make_cartpole_data(p, cfg.seed())), p, v);
  }
  if (task == "classification") {
    const auto p = cfg.classification();
    return experiments::classification_sampler(std::make_shared<const data::ToyClassification>(p.blobs), p, v);
  }
  if (task == "csv") {
    auto split = std::make_shared<const data::TabularSplit>(load_csv_task(cfg));
    const Index b = std::min(cfg.batch_size(), split->train.size());
    const Index n_max = std::min(cfg.n_max(), b - 1);
    return [split, b, n_max, v](Rng& rng) { return data::make_batch(split->train, b, n_max, v, rng); };
  }
  throw ConfigError("unknown task '" + task + "'");
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,train_loss,eval_loss,eval_loss_se\n";
  for (const TraceRow& r : trace) {
    out += std::to_string(r.iteration) + "," + fmt(r.train_loss) + "," + fmt(r.eval_loss) + "," +
           fmt(r.eval_loss_se) + "\n";
  }
  return out;
}

TrainRun run_training(const ExperimentConfig& cfg, const LogFn& log) {
  cfg.validate();
  const std::string dir = cfg.output_dir();
  ensure_dir(dir);
  write_text_file(join(dir, "config.resolved.json"), cfg.dump());

  const Variant v = cfg.variant();
  TrainRun run{make_model(v, cfg.dims(), cfg.seed()), {}};
  const TaskSampler sampler = make_task_sampler(cfg, v);
  const TrainConfig tc = cfg.train();
  try {
    run.result = train(run.model, sampler, tc, [&](const TraceRow& r) {
      if (log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "iter %lld  train %.4f  eval %.4f (se %.4f)",
                      static_cast<long long>(r.iteration), r.train_loss, r.eval_loss, r.eval_loss_se);
        log(buf);
      }
    });
  } catch (const TrainingAborted& e) {
    save_checkpoint(join(dir, "checkpoint.last_good.json"), e.last_good(), cfg.hash());
    throw;
  }
  save_checkpoint(join(dir, "checkpoint.json"), run.model, cfg.hash());
  write_text_file(join(dir, "trace.csv"), trace_to_csv(run.result.trace));
  return run;
}

json run_evaluation(const std::vector<NpModel>& models, const ExperimentConfig& cfg, const EvalOptions& opt,
                    const LogFn& log) {
  if (models.empty()) throw ContractError("run_evaluation: no models");
  const ModelDims want = cfg.dims();
  for (const NpModel& m : models) {
    if (m.dims.dx != want.dx || m.dims.dy != want.dy || m.dims.likelihood != want.likelihood) {
      throw DimensionError("checkpoint has dx=" + std::to_string(m.dims.dx) + " dy=" + std::to_string(m.dims.dy) +
                           " (" + to_string(m.dims.likelihood) + "), task '" + cfg.task() + "' needs dx=" +
                           std::to_string(want.dx) + " dy=" + std::to_string(want.dy) + " (" +
                           to_string(want.likelihood) + ")");
    }
  }
  const EvalSettings es = cfg.eval();
  const std::string task = cfg.task();
  const std::uint64_t seed = cfg.seed();
  json rows = json::array();
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };

  // loss of the training objective on the held-out task stream used by the trace
  {
    std::vector<double> losses;
    for (const NpModel& m : models) {
      const TrainConfig tc = cfg.train();
      losses.push_back(held_out_loss(m, make_task_sampler(cfg, m.variant), tc.kl, tc.eval_batches, seed).mean);
    }
    rows.push_back(metric_row("heldout_loss", losses, nullptr));
  }

  if (task == "sp1d") {
    const auto p = cfg.synthetic();
    const data::SpCurveTask curves(p.curves);
    Rng set_rng = make_rng(seed, kEvalSetStream);
    const auto interp = experiments::synthetic_eval_set(curves, p, false, es.realizations, set_rng);
    const auto extrap = experiments::synthetic_eval_set(curves, p, true, es.realizations, set_rng);
    const double prior_var = p.curves.kernel.signal_std * p.curves.kernel.signal_std + p.curves.kernel.jitter;
    rows.push_back(metric_row("nll_interp_context_free", {experiments::context_free_nll(interp, prior_var)}, "P"));
    std::vector<NllResult> ri, re;
    for (const NpModel& m : models) {
      Rng r = make_rng(seed, kEvalPredictStream);
      ri.push_back(eval_nll(m, interp, es.k, es.s, r));
      re.push_back(eval_nll(m, extrap, es.k, es.s, r));
      say(to_string(m.variant) + ": interp P " + fmt(ri.back().points) + ", extrap P " + fmt(re.back().points));
    }
    nll_rows(rows, "nll_interp", ri, opt);
    nll_rows(rows, "nll_extrap", re, opt);
  } else if (task == "osband") {
    const data::TabularDataset train = osband_train(cfg);
    Matrix gx, gy;
    data::osband_eval_grid(cfg.osband(), gx, gy);
    EvalRealization r;
    r.x.resize(train.size() + gx.rows(), 1);
    r.y.resize(train.size() + gx.rows(), 1);
    r.x << train.inputs, gx;
    r.y << train.outputs, gy;
    for (Index i = 0; i < train.size(); ++i) r.context_rows.push_back(i);
    std::vector<NllResult> res;
    std::vector<double> mses;
    for (const NpModel& m : models) {
      Rng rr = make_rng(seed, kEvalPredictStream);
      res.push_back(eval_nll(m, {r}, es.k, es.s, rr));
      mses.push_back(eval_mse(m, {r}).mse);
    }
    nll_rows(rows, "nll_grid", res, opt);
    rows.push_back(metric_row("mse_grid", mses, nullptr));
  } else if (task == "cartpole") {
    const auto p = cfg.cartpole();
    const auto d = experiments::make_cartpole_data(p, seed);
    Rng set_rng = make_rng(seed, kEvalSetStream);
    const auto set = experiments::cartpole_eval_set(d, p, set_rng);
    std::vector<double> mses;
    std::vector<NllResult> res;
    for (const NpModel& m : models) {
      mses.push_back(eval_mse(m, set).mse);
      if (m.dims.likelihood == Likelihood::gaussian) {
        Rng r = make_rng(seed, kEvalPredictStream);
        res.push_back(eval_nll(m, set, es.k, es.s, r));
      }
      say(to_string(m.variant) + ": test mse " + fmt(mses.back()));
    }
    rows.push_back(metric_row("mse_test", mses, nullptr));
    if (res.size() == models.size()) nll_rows(rows, "nll_test", res, opt);
  } else if (task == "csv") {
    const data::TabularSplit split = load_csv_task(cfg);
    const Index ctx = es.n_context > 0 ? es.n_context : cfg.document()["task"]["csv"]["eval_context"].get<Index>();
    if (split.test.size() <= ctx) throw ContractError("csv eval: test split has no rows beyond the context");
    Rng set_rng = make_rng(seed, kEvalSetStream);
    std::vector<EvalRealization> set;
    for (Index i = 0; i < es.realizations; ++i) {
      set.push_back({split.test.inputs, split.test.outputs, pick_rows(split.test.size(), ctx, set_rng)});
    }
    std::vector<double> mses;
    for (const NpModel& m : models) mses.push_back(eval_mse(m, set).mse);
    rows.push_back(metric_row("mse_test", mses, nullptr));
  } else if (task == "classification") {
    const auto p = cfg.classification();
    const data::ToyClassification toy(p.blobs);
    const double hmax = std::log(static_cast<double>(toy.num_classes()));
    std::vector<double> in_mean, u_mean, b_mean;
    for (std::size_t i = 0; i < models.size(); ++i) {
      Rng r = make_rng(seed, kEvalPredictStream);
      const experiments::EntropySets e = experiments::classification_entropies(models[i], toy, p, es.k, es.s, r);
      const auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      };
      in_mean.push_back(mean(e.in_distribution));
      u_mean.push_back(mean(e.ood_uniform));
      b_mean.push_back(mean(e.ood_blob));
      if (!opt.cdf_dir.empty()) {
        const std::string suffix = models.size() > 1 ? "_" + std::to_string(i) : "";
        write_text_file(join(opt.cdf_dir, "cdf_in_distribution" + suffix + ".csv"),
                        cdf_csv(entropy_cdf(e.in_distribution, es.cdf_grid, hmax)));
        write_text_file(join(opt.cdf_dir, "cdf_ood_uniform" + suffix + ".csv"),
                        cdf_csv(entropy_cdf(e.ood_uniform, es.cdf_grid, hmax)));
        write_text_file(join(opt.cdf_dir, "cdf_ood_blob" + suffix + ".csv"),
                        cdf_csv(entropy_cdf(e.ood_blob, es.cdf_grid, hmax)));
      }
    }
    rows.push_back(metric_row("entropy_in_distribution", in_mean, nullptr));
    rows.push_back(metric_row("entropy_ood_uniform", u_mean, nullptr));
    rows.push_back(metric_row("entropy_ood_blob", b_mean, nullptr));
  } else {
    throw ConfigError("unknown task '" + task + "'");
  }
  return rows;
}

json generate_data(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string task = cfg.task();
  const std::uint64_t seed = cfg.seed();
  Rng rng = make_rng(seed, kGenStream);
  json manifest = {{"task", task}, {"seed", seed}, {"config_hash", cfg.hash()}};
  json files = json::array();
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(join(out_dir, name), text);
    files.push_back(name);
  };
  if (task == "sp1d") {
    const auto p = cfg.synthetic();
    const Index n = cfg.n_curves();
    emit("curves.csv", data::curves_to_csv(data::sp_curve_batch(n, rng, p.curves)));
    manifest["n_curves"] = n;
    manifest["points_per_curve"] = p.curves.grid_points;
  } else if (task == "osband") {
    const data::TabularDataset ds = osband_train(cfg);
    std::string out = "x,y\n";
    for (Index i = 0; i < ds.size(); ++i) out += fmt(ds.inputs(i, 0)) + "," + fmt(ds.outputs(i, 0)) + "\n";
    emit("osband.csv", out);
    manifest["n_points"] = ds.size();
  } else if (task == "cartpole") {
    const auto p = cfg.cartpole();
    const auto tr_cfg = data::cartpole_train_configs(p.base);
    const auto te_cfg = data::cartpole_test_configs(p.base);
    const auto tr = data::generate_trajectories(tr_cfg, p.n_traj, p.horizon, seed);
    const auto te = data::generate_trajectories(te_cfg, p.n_traj, p.horizon, seed ^ 0x7e57ULL);
    emit("train.csv", tr.to_csv());
    emit("test.csv", te.to_csv());
    manifest["train_configs"] = tr_cfg.size();
    manifest["test_configs"] = te_cfg.size();
    manifest["train_transitions"] = tr.transitions.size();
    manifest["test_transitions"] = te.transitions.size();
  } else if (task == "classification") {
    const auto p = cfg.classification();
    const data::ToyClassification toy(p.blobs);
    Matrix x, y;
    toy.sample(p.eval_queries, rng, x, y);
    std::string in = "x1,x2,label\n";
    for (Index i = 0; i < x.rows(); ++i) {
      Index c;
      y.row(i).maxCoeff(&c);
      in += fmt(x(i, 0)) + "," + fmt(x(i, 1)) + "," + std::to_string(c) + "\n";
    }
    auto points = [](const Matrix& m) {
      std::string s = "x1,x2\n";
      for (Index i = 0; i < m.rows(); ++i) s += fmt(m(i, 0)) + "," + fmt(m(i, 1)) + "\n";
      return s;
    };
    emit("in_distribution.csv", in);
    emit("ood_uniform.csv", points(toy.ood_uniform(p.eval_queries, rng)));
    emit("ood_blob.csv", points(toy.ood_blob(p.eval_queries, rng)));
    manifest["n_points"] = p.eval_queries;
  } else {
    throw ConfigError("gen-data: task '" + task + "' has no generator (csv data is user supplied)");
  }
  manifest["files"] = files;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  manifest["created"] = stamp;
  write_text_file(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  return manifest;
}

std::string gp_sample_csv(const ExperimentConfig& cfg, Index n, bool warped) {
  if (n < 1) throw ContractError("gp-sample: need n >= 1");
  const auto p = cfg.synthetic();
  Rng rng = make_rng(cfg.seed(), kGenStream);
  const Vector grid = even_grid(p.curves.grid_lo, p.curves.grid_hi, p.curves.grid_points);
  const GpPriorSampler sampler(grid, p.curves.kernel);
  std::string out = "curve_id,x,y\n";
  for (Index c = 0; c < n; ++c) {
    Vector f = sampler.sample(rng);
    if (warped) f = warp_curve(grid, f);
    for (Index i = 0; i < grid.size(); ++i) out += std::to_string(c) + "," + fmt(grid(i)) + "," + fmt(f(i)) + "\n";
  }
  return out;
}

}  // namespace nplab
