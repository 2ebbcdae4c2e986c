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

#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "nplab/data/batch.hpp"
#include "nplab/data/cartpole.hpp"
#include "nplab/data/classification.hpp"
#include "nplab/data/synthetic.hpp"
#include "nplab/data/tabular.hpp"
#include "nplab/errors.hpp"

using namespace nplab;
using namespace nplab::data;

TEST_CASE("osband function and dataset") {
  CHECK(osband_function(0.0) == 0.0);
  CHECK(osband_function(1.0) == doctest::Approx(1.0 + std::sin(4.0) + std::sin(13.0)).epsilon(1e-15));
  CHECK(osband_function(1.0) == doctest::Approx(0.663365).epsilon(1e-6));
  Rng rng = make_rng(3);
  const TabularDataset ds = osband_dataset(rng);
  REQUIRE(ds.size() == 20);
  int left = 0, right = 0;
  for (Index i = 0; i < 20; ++i) {
    const double x = ds.inputs(i, 0);
    left += x >= 0.0 && x <= 0.6;
    right += x >= 0.8 && x <= 1.0;
  }
  CHECK(left == 12);
  CHECK(right == 8);
  Matrix gx, gy;
  osband_eval_grid({}, gx, gy);
  CHECK(gx(0, 0) == -0.5);
  CHECK(gx(gx.rows() - 1, 0) == 1.5);
}

TEST_CASE("warped curves are bounded, seeded, and have the closed-form mean") {
  SpCurveTask task;
  Rng r1 = make_rng(1), r2 = make_rng(1);
  const auto a = task.sample_batch(3, r1), b = task.sample_batch(3, r2);
  for (int i = 0; i < 3; ++i) {
    CHECK(a[static_cast<std::size_t>(i)].y == b[static_cast<std::size_t>(i)].y);
    CHECK(a[static_cast<std::size_t>(i)].y.cwiseAbs().maxCoeff() <= 1.0);
  }
  CHECK(a[0].x.rows() == 400);
  std::size_t inside = 0;
  for (Index i = 0; i < 400; ++i) inside += std::abs(a[0].x(i, 0)) <= 1.0;
  CHECK(task.train_rows().size() == inside);

  // mean of y at fixed x over 10^4 curves vs sin(x) e^{-s2/2}
  SpCurveConfig small;
  small.grid_points = 5;
  SpCurveTask t5(small);
  Rng rng = make_rng(2);
  const int n = 10000;
  Vector s = Vector::Zero(5), ss = Vector::Zero(5);
  for (int i = 0; i < n; ++i) {
    const Curve c = t5.sample(rng);
    s += c.y.col(0);
    ss += c.y.col(0).cwiseAbs2();
  }
  const double s2 = 1.0 + small.kernel.jitter;
  for (Index j = 0; j < 5; ++j) {
    const double x = -2.0 + j;
    const double mean = s(j) / n, var = ss(j) / n - mean * mean;
    CHECK(std::abs(mean - warped_mean(x, s2)) < 3.0 * std::sqrt(var / n));
    CHECK(std::abs(ss(j) / n - warped_second_moment(x, s2)) < 0.02);
  }
}

TEST_CASE("curve CSV has one row per point") {
  Rng rng = make_rng(1);
  SpCurveConfig c;
  c.grid_points = 4;
  const std::string csv = curves_to_csv(sp_curve_batch(2, rng, c));
  CHECK(csv.rfind("curve_id,x,y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("cart-pole: hanging equilibrium is a fixed point") {
  CartPoleConfig cfg;
  const CartState rest(0.0, std::numbers::pi, 0.0, 0.0);
  const CartState next = cartpole_step(rest, 0.0, cfg);
  CHECK(std::abs(next(0)) < 1e-12);
  CHECK(std::abs(std::abs(next(1)) - std::numbers::pi) < 1e-12);
  CHECK(std::abs(next(2)) < 1e-12);
  CHECK(std::abs(next(3)) < 1e-12);
}

TEST_CASE("cart-pole: massless pole and no gravity reduce to F = m a") {
  CartPoleConfig cfg;
  cfg.gravity = 0.0;
  cfg.friction = 0.0;
  cfg.pole_mass = 0.0;
  const double f = 3.0;
  const CartState next = cartpole_step(CartState(0.0, 0.3, 0.0, 0.0), f, cfg);
  CHECK(next(2) == doctest::Approx(f * cfg.dt / cfg.cart_mass).epsilon(1e-12));
}

TEST_CASE("cart-pole: frictionless force-free energy drift under 1 percent") {
  CartPoleConfig cfg;
  cfg.friction = 0.0;
  cfg.dt = 0.02;
  for (double th0 : {std::numbers::pi / 2, 2.5, 1.0}) {
    CartState s(0.0, th0, 0.3, -0.5);
    const double e0 = cartpole_energy(s, cfg);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      s = cartpole_step(s, 0.0, cfg);
      worst = std::max(worst, std::abs(cartpole_energy(s, cfg) - e0));
    }
    CHECK(e0 > 0.0);
    CHECK(worst / e0 < 0.01);
  }
}

TEST_CASE("cart-pole: friction only removes energy") {
  CartPoleConfig cfg;
  CartState s(0.0, 2.0, 1.0, 0.0);
  double e = cartpole_energy(s, cfg);
  const double e0 = e;
  for (int i = 0; i < 50; ++i) {
    s = cartpole_step(s, 0.0, cfg);
    e = cartpole_energy(s, cfg);
  }
  CHECK(e < e0);
  CHECK(cartpole_energy(CartState(0.0, std::numbers::pi, 0.0, 0.0), cfg) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cart-pole: determinism, angle wrapping and input validation") {
  CartPoleConfig cfg;
  const CartState s(0.1, 3.0, -0.2, 4.0);
  CHECK(cartpole_step(s, 2.0, cfg) == cartpole_step(s, 2.0, cfg));
  for (int i = -10; i <= 10; ++i) {
    const double w = wrap_angle(0.7 * i);
    CHECK(w > -std::numbers::pi);
    CHECK(w <= std::numbers::pi);
    CHECK(std::abs(std::sin(w) - std::sin(0.7 * i)) < 1e-12);
  }
  CHECK(wrap_angle(-std::numbers::pi) == std::numbers::pi);
  CHECK_THROWS_AS(cartpole_step(CartState(std::nan(""), 0, 0, 0), 0.0, cfg), NumericError);
  CHECK_THROWS_AS(cartpole_step(s, 11.0, cfg), ContractError);
}

TEST_CASE("cart-pole grids and trajectory counts") {
  const auto train = cartpole_train_configs(), test = cartpole_test_configs();
  CHECK(train.size() == 6);
  CHECK(test.size() == 14);
  for (const auto& a : train)
    for (const auto& b : test)
      CHECK_FALSE((std::abs(a.cart_mass - b.cart_mass) < 1e-12 && std::abs(a.friction - b.friction) < 1e-12));
  const TrajectoryDataset ds = generate_trajectories(train, 400, 10, 7);
  CHECK(ds.transitions.size() == 24000);
  const TrajectoryDataset again = generate_trajectories(train, 400, 10, 7);
  CHECK(ds.to_csv() == again.to_csv());
  Matrix x, y;
  ds.env_matrices(2, x, y);
  CHECK(x.rows() == 4000);
  CHECK(x.cols() == 5);
  CHECK(y.cols() == 4);
  CHECK(x.col(4).cwiseAbs().maxCoeff() <= 10.0);
  CHECK(ds.to_csv().rfind("env_id,m_c,f_c,x_c,theta,x_dot,theta_dot,action,next_x_c", 0) == 0);
}

TEST_CASE("csv: standardisation, round trip, constant columns, split") {
  std::string text = "a,b,c\n";
  for (int i = 0; i < 40; ++i) text += std::to_string(i * 0.5) + ",7," + std::to_string(i * i - 3) + "\n";
  const TabularSplit s = load_csv_text(text, 2, 1, {true, 0.5, 11});
  CHECK(s.train.size() == 20);
  CHECK(s.test.size() == 20);
  CHECK(std::abs(s.train.inputs.col(0).mean()) < 1e-9);
  const double sd = std::sqrt((s.train.inputs.col(0).array() - s.train.inputs.col(0).mean()).square().mean());
  CHECK(std::abs(sd - 1.0) < 1e-9);
  CHECK(s.train.inputs.col(1).isZero(0.0));
  CHECK(s.train.input_stats.std(1) == 1.0);
  CHECK(std::abs(s.train.outputs.mean()) < 1e-9);

  std::set<Index> all(s.train_rows.begin(), s.train_rows.end());
  for (Index r : s.test_rows) CHECK(all.insert(r).second);
  CHECK(all.size() == 40);

  const Matrix raw = Matrix::Random(6, 3) * 10.0;
  const ColumnStats st = ColumnStats::fit(raw);
  CHECK((st.invert(st.apply(raw)) - raw).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("csv: malformed input reports the line") {
  CHECK_THROWS_WITH_AS(parse_numeric_csv("1,2\n3,x\n", 2, false), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(parse_numeric_csv("1,2\n3\n", 2, false), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", 1, 1), IoError);

  // a 28-column table accepted as (21, 7) and rejected as (21, 8)
  std::string t;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 28; ++c) t += std::to_string(r * c + c) + (c == 27 ? "\n" : ",");
  }
  CHECK(load_csv_text(t, 21, 7).train.dx() == 21);
  CHECK_THROWS_WITH_AS(load_csv_text(t, 21, 8), doctest::Contains("line 1"), ParseError);
}

TEST_CASE("batch sampler conventions") {
  const Matrix x = Vector::LinSpaced(30, 0, 29), y = Vector::LinSpaced(30, 100, 129);
  Rng rng = make_rng(1);
  for (int i = 0; i < 200; ++i) {
    const ContextTargetBatch b = make_batch(x, y, 10, 1, Variant::np, rng);
    CHECK(b.num_context() == 1);
    CHECK(b.num_target() == 10);
    CHECK(b.x_target(0, 0) == b.x_context(0, 0));
    CHECK(b.y_target(0, 0) - b.x_target(0, 0) == 100.0);
  }
  for (int i = 0; i < 200; ++i) {
    const ContextTargetBatch b = make_batch(x, y, 10, 10, Variant::cnp, rng);
    CHECK(b.num_context() >= 1);
    CHECK(b.num_context() + b.num_target() == 10);
    std::set<double> ctx(b.x_context.data(), b.x_context.data() + b.num_context());
    for (Index j = 0; j < b.num_target(); ++j) CHECK(ctx.count(b.x_target(j, 0)) == 0);
  }
  CHECK_THROWS_AS(make_batch(x, y, 10, 11, Variant::np, rng), ContractError);
  CHECK_THROWS_AS(make_batch(x, y, 1, 1, Variant::cnp, rng), ContractError);
}

TEST_CASE("context counts are uniform on 1..n_max") {
  const Matrix x = Vector::LinSpaced(20, 0, 1), y = x;
  Rng rng = make_rng(5);
  const int n_max = 8, draws = 100000;
  std::vector<int> counts(n_max + 1, 0);
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(make_batch(x, y, 20, n_max, Variant::dsvnp, rng).num_context())];
  CHECK(counts[0] == 0);
  double chi2 = 0.0;
  const double e = static_cast<double>(draws) / n_max;
  for (int k = 1; k <= n_max; ++k) chi2 += (counts[static_cast<std::size_t>(k)] - e) * (counts[static_cast<std::size_t>(k)] - e) / e;
  CHECK(chi2 < 18.475);  // 99% quantile, 7 degrees of freedom
}

TEST_CASE("toy classification sets") {
  ToyClassification task;
  Rng rng = make_rng(1);
  Matrix x, y;
  task.sample(300, rng, x, y);
  CHECK(y.rowwise().sum().isOnes(0.0));
  CHECK(y.colwise().sum().minCoeff() > 50);
  const Matrix u = task.ood_uniform(500, rng);
  CHECK(u.rows() == 500);
  CHECK(u.cwiseAbs().maxCoeff() > 5.0);
  const Matrix b = task.ood_blob(500, rng);
  CHECK(b.colwise().mean().norm() < 0.2);
}
