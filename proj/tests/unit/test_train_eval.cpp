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

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <numeric>

#include "doctest.h"
#include "../support/gradcheck.hpp"
#include "nplab/data/batch.hpp"
#include "nplab/data/synthetic.hpp"
#include "nplab/eval.hpp"
#include "nplab/train.hpp"

using namespace nplab;

namespace {

constexpr Variant kAll[] = {Variant::cnp, Variant::np, Variant::attn_np, Variant::dsvnp};

TaskSampler osband_sampler(Variant v) {
  Rng rng = make_rng(99);
  auto ds = std::make_shared<data::TabularDataset>(data::osband_dataset(rng));
  return [ds, v](Rng& r) { return data::make_batch(*ds, 20, 10, v, r); };
}

ModelDims small_dims() {
  ModelDims d = testing::tiny_dims(1, 1);
  d.dim_lat = 8;
  d.encoder_hidden = {16, 16};
  d.decoder_hidden = {32, 32};
  return d;
}

std::vector<EvalRealization> random_set(Index n_sets, Index points, Index n_ctx, Index dx, Index dy,
                                        std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<EvalRealization> out;
  for (Index i = 0; i < n_sets; ++i) {
    EvalRealization r;
    r.x = Matrix::Random(points, dx);
    r.y = (r.x.leftCols(1) * RowVector::Ones(dy)).array().sin().matrix() + 0.1 * Matrix::Random(points, dy);
    for (Index c = 0; c < n_ctx; ++c) r.context_rows.push_back((c * 7 + i) % points);
    std::sort(r.context_rows.begin(), r.context_rows.end());
    r.context_rows.erase(std::unique(r.context_rows.begin(), r.context_rows.end()), r.context_rows.end());
    out.push_back(std::move(r));
  }
  (void)rng;
  return out;
}

}  // namespace

TEST_CASE("lr = 0 leaves parameters untouched and the held-out trace flat") {
  for (Variant v : kAll) {
    CAPTURE(to_string(v));
    NpModel m = make_model(v, small_dims(), 4);
    const NpModel before = m;
    TrainConfig cfg;
    cfg.iterations = 30;
    cfg.lr = 0.0;
    cfg.eval_every = 10;
    cfg.eval_batches = 5;
    const TrainResult r = train(m, osband_sampler(v), cfg);
    for (const auto& [name, value] : before.params) CHECK(m.params.at(name) == value);
    REQUIRE(r.trace.size() == 3);
    for (const TraceRow& row : r.trace) CHECK(row.eval_loss == r.trace.front().eval_loss);
  }
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  for (Variant v : kAll) {
    CAPTURE(to_string(v));
    TrainConfig cfg;
    cfg.iterations = 25;
    cfg.k = 2;
    cfg.s = 2;
    cfg.tasks_per_step = 2;
    cfg.seed = 17;
    cfg.eval_every = 25;
    cfg.eval_batches = 2;
    NpModel a = make_model(v, small_dims(), 1), b = make_model(v, small_dims(), 1);
    const TrainResult ra = train(a, osband_sampler(v), cfg), rb = train(b, osband_sampler(v), cfg);
    for (const auto& [name, value] : a.params) CHECK(b.params.at(name) == value);
    CHECK(ra.trace.back().train_loss == rb.trace.back().train_loss);

    cfg.seed = 18;
    NpModel c = make_model(v, small_dims(), 1);
    train(c, osband_sampler(v), cfg);
    CHECK(c.params.at("decoder.w0") != a.params.at("decoder.w0"));
  }
}

TEST_CASE("200 iterations on the fixed-function task reduce the smoothed training loss") {
  for (Variant v : kAll) {
    CAPTURE(to_string(v));
    NpModel m = make_model(v, small_dims(), 2);
    TrainConfig cfg;
    cfg.iterations = 200;
    cfg.lr = 3e-3;
    cfg.tasks_per_step = 4;
    cfg.eval_every = 1;
    cfg.eval_batches = 1;
    std::vector<double> losses;
    train(m, osband_sampler(v), cfg, [&](const TraceRow& r) { losses.push_back(r.train_loss); });
    REQUIRE(losses.size() == 200);
    const double first = std::accumulate(losses.begin(), losses.begin() + 10, 0.0) / 10.0;
    const double last = std::accumulate(losses.end() - 20, losses.end(), 0.0) / 20.0;
    CHECK(last < first);
  }
}

TEST_CASE("train rejects bad configs") {
  NpModel m = make_model(Variant::np, small_dims(), 1);
  TrainConfig cfg;
  cfg.iterations = -1;
  CHECK_THROWS_AS(train(m, osband_sampler(Variant::np), cfg), ConfigError);
  cfg.iterations = 10;
  cfg.k = 0;
  CHECK_THROWS_AS(train(m, osband_sampler(Variant::np), cfg), ConfigError);
}

TEST_CASE("mixture NLL at the mean with unit sigma") {
  PredictiveMixture mix;
  const Matrix mu = Matrix::Constant(4, 1, 0.3);
  mix.components.push_back(GaussianParams::from_std(mu, Matrix::Ones(4, 1)));
  CHECK((-mix.log_density(mu)).array().abs().maxCoeff() == doctest::Approx(0.918939).epsilon(1e-6));
  CHECK(-mix.log_density(mu)(0) == doctest::Approx(kHalfLog2Pi).epsilon(1e-14));
  // duplicating a component leaves the density unchanged
  mix.components.push_back(mix.components.front());
  CHECK(-mix.log_density(mu)(2) == doctest::Approx(kHalfLog2Pi).epsilon(1e-14));
}

TEST_CASE("CNP is reported under P only and matches deterministic inference") {
  const NpModel m = make_model(Variant::cnp, small_dims(), 3);
  const auto set = random_set(5, 12, 4, 1, 1, 1);
  Rng rng = make_rng(1);
  const NllResult r = eval_nll(m, set, 1, 1, rng);
  CHECK_FALSE(r.joint_applicable);
  CHECK(std::isnan(r.joint));
  double acc = 0.0;
  for (const EvalRealization& e : set) {
    std::vector<Index> off;
    Matrix xc(static_cast<Index>(e.context_rows.size()), 1), yc = xc;
    for (std::size_t i = 0; i < e.context_rows.size(); ++i) {
      xc(static_cast<Index>(i), 0) = e.x(e.context_rows[i], 0);
      yc(static_cast<Index>(i), 0) = e.y(e.context_rows[i], 0);
    }
    const GaussianParams p = predict_deterministic(m, xc, yc, e.x);
    const Vector rows = gaussian_nll_rows(e.y, p);
    double s = 0.0;
    Index n = 0;
    for (Index i = 0; i < e.x.rows(); ++i) {
      if (std::find(e.context_rows.begin(), e.context_rows.end(), i) != e.context_rows.end()) continue;
      s += rows(i);
      ++n;
    }
    acc += s / static_cast<double>(n);
  }
  CHECK(r.points == doctest::Approx(acc / 5.0).epsilon(1e-12));
}

TEST_CASE("J is the point-weighted combination of context and off-context NLL") {
  for (Variant v : {Variant::np, Variant::attn_np, Variant::dsvnp}) {
    CAPTURE(to_string(v));
    const NpModel m = make_model(v, small_dims(), 5);
    const auto set = random_set(1, 15, 5, 1, 1, 2);
    Rng r1 = make_rng(8), r2 = make_rng(8);
    const NllResult res = eval_nll(m, set, 3, 2, r1);
    const Vector nll = pointwise_nll(m, set[0], 3, 2, r2);
    double ctx = 0.0, off = 0.0;
    for (Index i = 0; i < 15; ++i) {
      const bool in_ctx = std::find(set[0].context_rows.begin(), set[0].context_rows.end(), i) !=
                          set[0].context_rows.end();
      (in_ctx ? ctx : off) += nll(i);
    }
    const double nc = static_cast<double>(set[0].context_rows.size());
    CHECK(res.points == doctest::Approx(off / (15.0 - nc)).epsilon(1e-12));
    const double recon = (nc / 15.0) * (ctx / nc) + ((15.0 - nc) / 15.0) * res.points;
    CHECK(std::abs(res.joint - recon) < 1e-9);
  }
}

TEST_CASE("J and P coincide with an empty context") {
  for (Variant v : {Variant::np, Variant::dsvnp}) {
    const NpModel m = make_model(v, small_dims(), 6);
    auto set = random_set(3, 10, 0, 1, 1, 3);
    Rng rng = make_rng(2);
    const NllResult r = eval_nll(m, set, 2, 2, rng);
    CHECK(r.joint == doctest::Approx(r.points).epsilon(1e-14));
  }
}

TEST_CASE("eval_mse: loop oracle, zero predictor, dimension permutation") {
  ModelDims d = small_dims();
  d.dx = 2;
  d.dy = 3;
  const NpModel m = make_model(Variant::dsvnp, d, 7);
  const auto set = random_set(4, 20, 6, 2, 3, 4);
  const MseResult r = eval_mse(m, set);

  double sum = 0.0;
  Index n = 0;
  for (const EvalRealization& e : set) {
    Matrix xc(static_cast<Index>(e.context_rows.size()), 2), yc(static_cast<Index>(e.context_rows.size()), 3);
    for (std::size_t i = 0; i < e.context_rows.size(); ++i) {
      xc.row(static_cast<Index>(i)) = e.x.row(e.context_rows[i]);
      yc.row(static_cast<Index>(i)) = e.y.row(e.context_rows[i]);
    }
    const Matrix mean = predict_deterministic(m, xc, yc, e.x).mean;
    for (Index i = 0; i < e.x.rows(); ++i) {
      if (std::find(e.context_rows.begin(), e.context_rows.end(), i) != e.context_rows.end()) continue;
      for (Index j = 0; j < 3; ++j) {
        sum += (mean(i, j) - e.y(i, j)) * (mean(i, j) - e.y(i, j));
        ++n;
      }
    }
  }
  CHECK(std::abs(r.mse - sum / static_cast<double>(n)) < 1e-12);
  CHECK(r.per_dimension.size() == 3);

  // permuting output dimensions (data and decoder mean columns together)
  NpModel p = m;
  const std::vector<Index> perm{2, 0, 1};
  Matrix& w_last = p.params.at("decoder.w" + std::to_string(d.decoder_hidden.size()));
  Matrix& b_last = p.params.at("decoder.b" + std::to_string(d.decoder_hidden.size()));
  const Matrix w0 = w_last, b0 = b_last;
  for (Index j = 0; j < 3; ++j) {
    w_last.col(j) = w0.col(perm[static_cast<std::size_t>(j)]);
    b_last.col(j) = b0.col(perm[static_cast<std::size_t>(j)]);
    w_last.col(3 + j) = w0.col(3 + perm[static_cast<std::size_t>(j)]);
    b_last.col(3 + j) = b0.col(3 + perm[static_cast<std::size_t>(j)]);
  }
  // the encoders see y as input rows dx .. dx+dy-1; those must be permuted too
  for (const char* name : {"encoder.w0"}) {
    Matrix& w = p.params.at(name);
    const Matrix orig = w;
    for (Index j = 0; j < 3; ++j) w.row(2 + j) = orig.row(2 + perm[static_cast<std::size_t>(j)]);
  }
  {
    Matrix& w = p.params.at("embed_y.w0");
    const Matrix orig = w;
    for (Index j = 0; j < 3; ++j) w.row(j) = orig.row(perm[static_cast<std::size_t>(j)]);
  }
  auto permuted = set;
  for (auto& e : permuted) {
    const Matrix y0 = e.y;
    for (Index j = 0; j < 3; ++j) e.y.col(j) = y0.col(perm[static_cast<std::size_t>(j)]);
  }
  const MseResult rp = eval_mse(p, permuted);
  CHECK(rp.mse == doctest::Approx(r.mse).epsilon(1e-12));
  for (Index j = 0; j < 3; ++j) CHECK(rp.per_dimension(j) == doctest::Approx(r.per_dimension(perm[static_cast<std::size_t>(j)])).epsilon(1e-12));

  // zero predictor on unit-variance targets
  NpModel z = make_model(Variant::np, small_dims(), 1);
  z.params.at("decoder.w2").setZero();
  z.params.at("decoder.b2").setZero();
  Rng rng = make_rng(5);
  std::normal_distribution<double> nd;
  std::vector<EvalRealization> unit(1);
  unit[0].x = Matrix::Random(20000, 1);
  unit[0].y.resize(20000, 1);
  for (Index i = 0; i < 20000; ++i) unit[0].y(i, 0) = nd(rng);
  unit[0].context_rows = {0, 1, 2};
  CHECK(std::abs(eval_mse(z, unit).mse - 1.0) < 0.03);

  CHECK(mse(Matrix::Ones(2, 2), Matrix::Ones(2, 2)) == 0.0);
  CHECK_THROWS_AS(mse(Matrix::Ones(2, 2), Matrix::Ones(2, 3)), DimensionError);
}

TEST_CASE("predictive entropy examples and contracts") {
  RowVector onehot = RowVector::Zero(4);
  onehot(2) = 1.0;
  CHECK(predictive_entropy(onehot) == 0.0);
  CHECK(predictive_entropy(RowVector::Constant(10, 0.1)) == doctest::Approx(2.302585).epsilon(1e-6));
  CHECK(predictive_entropy(RowVector::Constant(2, 0.5)) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK_THROWS_AS(predictive_entropy(RowVector::Constant(2, 0.6)), ContractError);
  RowVector neg(2);
  neg << 1.5, -0.5;
  CHECK_THROWS_AS(predictive_entropy(neg), ContractError);
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    RowVector p(5);
    for (Index c = 0; c < 5; ++c) p(c) = u(rng);
    p /= p.sum();
    const double h = predictive_entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(5.0));
  }
}

TEST_CASE("entropy CDF against sort-and-count") {
  const double hmax = std::log(10.0);
  CHECK_THROWS_AS(entropy_cdf({}, 10, hmax), ContractError);

  const auto step = entropy_cdf(std::vector<double>(7, 1.0), 101, hmax);
  for (const auto& [h, c] : step) CHECK(c == (h >= 1.0 ? 1.0 : 0.0));

  Rng rng = make_rng(4);
  std::uniform_real_distribution<double> u(0.0, hmax);
  std::vector<double> hs(997);
  for (double& h : hs) h = u(rng);
  const auto cdf = entropy_cdf(hs, 64, hmax);
  REQUIRE(cdf.size() == 64);
  CHECK(cdf.front().first == 0.0);
  CHECK(cdf.back().first == hmax);
  CHECK(cdf.back().second == 1.0);
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const double count = static_cast<double>(std::count_if(hs.begin(), hs.end(), [&](double h) { return h <= cdf[i].first; }));
    CHECK(std::abs(cdf[i].second - count / 997.0) <= 1.0 / 997.0);
    if (i > 0) CHECK(cdf[i].second >= cdf[i - 1].second);
  }
}

TEST_CASE("mean and variance across seeds") {
  const MeanVar mv = mean_and_variance({1.0, 2.0, 3.0, 4.0});
  CHECK(mv.mean == 2.5);
  CHECK(mv.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(mean_and_variance({3.0}).variance == 0.0);
}
