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

#include <filesystem>
#include <set>
#include <sstream>

#include "../support/gradcheck.hpp"
#include "doctest.h"
#include "nplab/checkpoint.hpp"
#include "nplab/config.hpp"
#include "nplab/errors.hpp"
#include "nplab/runner.hpp"

using namespace nplab;
using nlohmann::json;

namespace {

std::string temp_dir(const std::string& tag) {
  const auto p = std::filesystem::temp_directory_path() / ("nplab_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

// A run small enough for a unit test.
ExperimentConfig tiny_run(const std::string& variant, const std::string& dir) {
  return ExperimentConfig::resolve(json::parse(R"({
    "output_dir": ")" + dir + R"(",
    "model": {"variant": ")" + variant + R"(", "dim_lat": 4, "dim_latx": 3, "dim_laty": 3,
              "encoder_hidden": [6], "decoder_hidden": [8]},
    "task": {"name": "osband", "batch_size": 20, "n_max": 10},
    "train": {"iterations": 30, "eval_every": 10, "eval_batches": 4, "kl_weight_local": 1.0},
    "eval": {"k": 2, "s": 2}
  })"));
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("checkpoint round trip is byte-identical for every variant") {
  for (Variant v : {Variant::cnp, Variant::np, Variant::attn_np, Variant::dsvnp}) {
    CAPTURE(to_string(v));
    NpModel m = make_model(v, testing::tiny_dims(2, 3), 9);
    for (auto& [name, p] : m.params) p.array() += 1.0 / 3.0;  // values needing all 17 digits
    const std::string a = checkpoint_to_string(m, "abc");
    const LoadedCheckpoint c = checkpoint_from_string(a);
    CHECK(c.config_hash == "abc");
    CHECK(c.model.variant == v);
    CHECK(c.model.dims.decoder_hidden == m.dims.decoder_hidden);
    for (const auto& [name, p] : m.params) CHECK(c.model.params.at(name) == p);
    CHECK(checkpoint_to_string(c.model, c.config_hash) == a);
  }
}

TEST_CASE("checkpoint files, hash warnings and load errors") {
  const std::string dir = temp_dir("ckpt");
  const NpModel m = make_model(Variant::np, testing::tiny_dims(1, 1), 1);
  const std::string path = dir + "/c.json";
  save_checkpoint(path, m, "h1");
  std::vector<std::string> warnings;
  auto warn = [&](const std::string& w) { warnings.push_back(w); };
  load_checkpoint(path, "h1", warn);
  CHECK(warnings.empty());
  const LoadedCheckpoint c = load_checkpoint(path, "h2", warn);
  CHECK(warnings.size() == 1);
  CHECK(c.model.params == m.params);

  CHECK_THROWS_AS(load_checkpoint(dir + "/missing.json"), IoError);
  CHECK_THROWS_AS(checkpoint_from_string("{not json"), ParseError);
  CHECK_THROWS_AS(checkpoint_from_string(R"({"header": {"variant": "np"}})"), ParseError);

  json doc = json::parse(checkpoint_to_string(m, "h"));
  doc["header"]["dim_lat"] = 5;
  CHECK_THROWS_WITH_AS(checkpoint_from_string(doc.dump()), doctest::Contains("dim_lat=5"), DimensionError);
  doc = json::parse(checkpoint_to_string(m, "h"));
  doc["header"]["format_version"] = 99;
  CHECK_THROWS_AS(checkpoint_from_string(doc.dump()), ParseError);
  CHECK_THROWS_AS(save_checkpoint(dir + "/no/such/dir/c.json", m, "h"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("profiles carry the experiment defaults") {
  const auto e1 = ExperimentConfig::resolve(json::object(), "synthetic-e1");
  CHECK(e1.dims().dim_lat == 128);
  CHECK(e1.train().lr == 5e-4);
  CHECK(e1.train().kl.local == 1000.0);
  CHECK(e1.task() == "sp1d");

  const auto e2 = ExperimentConfig::resolve(json::object(), "cartpole-e2");
  CHECK(e2.dims().dx == 5);
  CHECK(e2.dims().dy == 4);
  CHECK(e2.dims().dim_lat == 32);
  CHECK(e2.dims().decoder_hidden == std::vector<Index>{400, 400});
  CHECK(e2.train().lr == 1e-3);
  CHECK(e2.train().kl.local == 1.0);
  CHECK(e2.train().kl.global == 5.0);
  CHECK(e2.cartpole().eval_context == 100);

  // the csv task needs its column split before it validates
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::object(), "multiout-e3"), ConfigError);
  const auto e3 = ExperimentConfig::resolve(json::parse(R"({"task": {"csv": {"path": "x.csv", "dx": 21, "dy": 7}}})"),
                                            "multiout-e3");
  CHECK(e3.dims().likelihood == Likelihood::mse);
  CHECK(e3.dims().dim_laty == 8);
  CHECK(e3.dims().dx == 21);

  const auto cl = ExperimentConfig::resolve(json::object(), "classification");
  CHECK(cl.dims().likelihood == Likelihood::categorical);
  CHECK(cl.dims().dy == 3);

  CHECK_THROWS_AS(ExperimentConfig::resolve(json::object(), "nope"), ConfigError);
  CHECK(ExperimentConfig::resolve(json{{"profile", "cartpole-e2"}}).task() == "cartpole");
}

TEST_CASE("config rejects unknown keys and wrong types") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::resolve(json::parse(R"({"train": {"lrr": 1}})")),
                       doctest::Contains("train.lrr"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::parse(R"({"train": {"iterations": "many"}})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::parse(R"({"train": {"iterations": 1.5}})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::parse(R"({"model": {"variant": "gp"}})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::parse(R"({"task": {"n_max": 500}})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::resolve(json::parse(R"({"model": {"loss_mode": "categorical"}})")), ConfigError);

  ExperimentConfig c = ExperimentConfig::resolve(json::object());
  c.set("train.lr", "0.01");
  CHECK(c.train().lr == 0.01);
  c.set("model.variant", "np");
  CHECK(c.variant() == Variant::np);
  CHECK_THROWS_AS(c.set("train.nothing", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("train.k", "0"), ConfigError);
  CHECK(c.train().k == 1);  // a rejected set leaves the config unchanged

  ExperimentConfig d = c;
  d.set("output_dir", "elsewhere");
  d.set("eval.k", "3");
  CHECK(d.hash() == c.hash());
  d.set("seed", "3");
  CHECK(d.hash() != c.hash());
}

TEST_CASE("resolved config round-trips through its own dump") {
  const auto c = ExperimentConfig::resolve(json::parse(R"({"seed": 4, "train": {"lr": 0.002}})"), "cartpole-e2");
  const auto again = ExperimentConfig::resolve(json::parse(c.dump()), "synthetic-e1");
  CHECK(again.dump() == c.dump());
  CHECK(again.hash() == c.hash());
}

TEST_CASE("training run writes three files and is byte-reproducible") {
  for (const char* v : {"cnp", "dsvnp"}) {
    CAPTURE(v);
    const std::string a = temp_dir(std::string("run_a_") + v), b = temp_dir(std::string("run_b_") + v);
    const TrainRun ra = run_training(tiny_run(v, a));
    run_training(tiny_run(v, b));
    std::set<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(a)) files.insert(e.path().filename().string());
    CHECK(files == std::set<std::string>{"checkpoint.json", "config.resolved.json", "trace.csv"});
    CHECK(read_text_file(a + "/checkpoint.json") == read_text_file(b + "/checkpoint.json"));
    CHECK(read_text_file(a + "/trace.csv") == read_text_file(b + "/trace.csv"));

    // evaluation on the training seed reproduces the final held-out loss of the trace
    const ExperimentConfig cfg = tiny_run(v, a);
    const json rows = run_evaluation({load_checkpoint(a + "/checkpoint.json").model}, cfg, {});
    CHECK(rows[0]["metric"] == "heldout_loss");
    CHECK(rows[0]["value"].get<double>() == doctest::Approx(ra.result.trace.back().eval_loss).epsilon(1e-12));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
  }
}

TEST_CASE("lr = 0 run has a flat held-out trace") {
  const std::string dir = temp_dir("flat");
  ExperimentConfig cfg = tiny_run("np", dir);
  cfg.set("train.lr", "0");
  const TrainRun r = run_training(cfg);
  for (const TraceRow& row : r.result.trace) CHECK(row.eval_loss == r.result.trace.front().eval_loss);
  std::filesystem::remove_all(dir);
}

TEST_CASE("evaluation reports J/P rows and marks CNP J as not applicable") {
  const std::string dir = temp_dir("eval");
  const ExperimentConfig cfg = tiny_run("cnp", dir);
  const NpModel m = make_model(Variant::cnp, cfg.dims(), 1);
  const json rows = run_evaluation({m}, cfg, {});
  bool saw_na = false;
  for (const auto& r : rows) {
    if (r["metric"] == "nll_grid" && r["convention"] == "J") saw_na = r.value("not_applicable", false);
  }
  CHECK(saw_na);

  const ExperimentConfig npc = tiny_run("np", dir);
  const NpModel a = make_model(Variant::np, npc.dims(), 1), b = make_model(Variant::np, npc.dims(), 2);
  const json two = run_evaluation({a, b}, npc, {true, false, ""});
  for (const auto& r : two) {
    CHECK(r["n_seeds"] == 2);
    CHECK(r["convention"] != "P");
  }
  // dims mismatch names both sides
  ExperimentConfig cp = ExperimentConfig::resolve(json::object(), "cartpole-e2");
  CHECK_THROWS_WITH_AS(run_evaluation({a}, cp, {}), doctest::Contains("dx=5"), DimensionError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("data generation: curve counts, cart-pole manifest, determinism") {
  const std::string a = temp_dir("gen_a"), b = temp_dir("gen_b");
  ExperimentConfig sp = ExperimentConfig::resolve(json::parse(R"({"task": {"sp1d": {"grid_points": 20}}})"));
  const json m = generate_data(sp, a);
  generate_data(sp, b);
  CHECK(m["n_curves"] == 2000);
  const std::string csv = read_text_file(a + "/curves.csv");
  CHECK(csv == read_text_file(b + "/curves.csv"));
  std::set<std::string> ids;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) ids.insert(line.substr(0, line.find(',')));
  CHECK(ids.size() == 2000);

  ExperimentConfig cp = ExperimentConfig::resolve(json::parse(R"({"task": {"cartpole": {"n_traj": 5}}})"), "cartpole-e2");
  const json mc = generate_data(cp, a);
  CHECK(mc["train_configs"] == 6);
  CHECK(mc["test_configs"] == 14);
  CHECK(mc["train_transitions"] == 6 * 5 * 10);

  const std::string gp = gp_sample_csv(sp, 3, false);
  CHECK(std::count(gp.begin(), gp.end(), '\n') == 1 + 3 * 20);
  CHECK(gp == gp_sample_csv(sp, 3, false));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
