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
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "doctest.h"
#include "nplab/gp.hpp"
#include "nplab/parameters.hpp"

using namespace nplab;

namespace {

// Conditioning by partitioning the joint covariance and inverting explicitly.
GpPosterior joint_oracle(const Vector& xc, const Vector& yc, const Vector& xt, const RbfKernel& k, double noise) {
  const Index n = xc.size(), m = xt.size();
  Vector all(n + m);
  all << xc, xt;
  Matrix joint(n + m, n + m);
  for (Index i = 0; i < n + m; ++i)
    for (Index j = 0; j < n + m; ++j) {
      const double d = all(i) - all(j);
      joint(i, j) = k.signal_std * k.signal_std * std::exp(-d * d / (2 * k.length_scale * k.length_scale));
    }
  Matrix scc = joint.topLeftCorner(n, n);
  scc.diagonal().array() += k.jitter + noise * noise;
  const Matrix inv = scc.inverse();
  return {joint.bottomLeftCorner(m, n) * inv * yc,
          joint.bottomRightCorner(m, m) - joint.bottomLeftCorner(m, n) * inv * joint.topRightCorner(n, m)};
}

Vector random_vec(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

}  // namespace

TEST_CASE("rbf kernel values") {
  RbfKernel k;
  CHECK(k(0.3, 0.3) == 1.0);
  CHECK(k(0.1, 0.1 + k.length_scale) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(k(0.0, 0.4) == doctest::Approx(0.606531).epsilon(1e-6));
  const Vector a = (Vector(3) << -1.0, 0.2, 0.5).finished(), b = (Vector(2) << 0.0, 1.3).finished();
  const Matrix km = kernel_matrix<double>(a, b, k);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) CHECK(km(i, j) == k(a(i), b(j)));
  const Matrix g = gram_matrix<double>(a, k);
  CHECK(g(1, 1) == 1.0 + k.jitter);
  CHECK_THROWS_AS(gp_posterior<double>(a, a, b, RbfKernel{-1.0, 1.0, 0.0}), ConfigError);
}

TEST_CASE("posterior with empty context is the prior") {
  RbfKernel k;
  const Vector xt = (Vector(3) << -0.5, 0.0, 0.7).finished();
  const GpPosterior p = gp_posterior<double>(Vector(0), Vector(0), xt, k, 0.0, [](double x) { return 2 * x; });
  CHECK((p.mean - 2 * xt).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.cov - kernel_matrix<double>(xt, xt, k)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless posterior interpolates a datum") {
  RbfKernel k;
  k.jitter = 1e-10;
  const Vector xc = Vector::Constant(1, 0.3), yc = Vector::Constant(1, -0.8);
  const GpPosterior p = gp_posterior<double>(xc, yc, xc, k);
  CHECK(p.mean(0) == doctest::Approx(-0.8).epsilon(1e-8));
  CHECK(p.cov(0, 0) <= 1e-8);
}

TEST_CASE("posterior matches brute-force joint conditioning") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    RbfKernel k;
    const Vector xc = random_vec(3, rng), yc = random_vec(3, rng), xt = random_vec(2, rng);
    const double noise = rep % 2 ? 0.1 : 0.0;
    const GpPosterior p = gp_posterior<double>(xc, yc, xt, k, noise);
    const GpPosterior o = joint_oracle(xc, yc, xt, k, noise);
    CHECK((p.mean - o.mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((p.cov - o.cov).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("posterior with a mean function shifts by the residual") {
  std::mt19937_64 rng(3);
  RbfKernel k;
  const Vector xc = random_vec(4, rng), yc = random_vec(4, rng), xt = random_vec(3, rng);
  auto phi = [](double x) { return std::sin(3 * x); };
  const GpPosterior p = gp_posterior<double>(xc, yc, xt, k, 0.05, phi);
  const GpPosterior z = gp_posterior<double>(xc, yc - xc.unaryExpr(phi), xt, k, 0.05);
  CHECK((p.mean - (z.mean + xt.unaryExpr(phi))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.cov - z.cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("posterior is symmetric, PSD, and never above the prior variance") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    RbfKernel k;
    const Vector xc = random_vec(6, rng), yc = random_vec(6, rng), xt = random_vec(5, rng);
    const GpPosterior p = gp_posterior<double>(xc, yc, xt, k, 0.01);
    CHECK((p.cov - p.cov.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.cov);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    for (Index i = 0; i < 5; ++i) CHECK(p.cov(i, i) <= k(xt(i), xt(i)) + 1e-10);
  }
}

TEST_CASE("posterior statistics are context-permutation invariant and target-permutation equivariant") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    RbfKernel k;
    const Vector xc = random_vec(5, rng), yc = random_vec(5, rng), xt = random_vec(4, rng);
    std::vector<Index> pc(5), pt(4);
    std::iota(pc.begin(), pc.end(), Index{0});
    std::iota(pt.begin(), pt.end(), Index{0});
    std::shuffle(pc.begin(), pc.end(), rng);
    std::shuffle(pt.begin(), pt.end(), rng);
    Vector xcp(5), ycp(5), xtp(4);
    for (Index i = 0; i < 5; ++i) {
      xcp(i) = xc(pc[static_cast<std::size_t>(i)]);
      ycp(i) = yc(pc[static_cast<std::size_t>(i)]);
    }
    for (Index i = 0; i < 4; ++i) xtp(i) = xt(pt[static_cast<std::size_t>(i)]);
    const GpPosterior a = gp_posterior<double>(xc, yc, xt, k, 0.05);
    const GpPosterior b = gp_posterior<double>(xcp, ycp, xt, k, 0.05);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.variance() - b.variance()).cwiseAbs().maxCoeff() < 1e-9);
    const GpPosterior c = gp_posterior<double>(xc, yc, xtp, k, 0.05);
    for (Index i = 0; i < 4; ++i) {
      const Index pi = pt[static_cast<std::size_t>(i)];
      CHECK(std::abs(c.mean(i) - a.mean(pi)) < 1e-9);
      for (Index j = 0; j < 4; ++j) CHECK(std::abs(c.cov(i, j) - a.cov(pi, pt[static_cast<std::size_t>(j)])) < 1e-9);
    }
  }
}

TEST_CASE("a duplicated noiseless datum barely moves the posterior") {
  RbfKernel k;
  const Vector xc = (Vector(2) << -0.4, 0.5).finished(), yc = (Vector(2) << 0.3, -0.6).finished();
  const Vector xd = (Vector(3) << -0.4, 0.5, 0.5).finished(), yd = (Vector(3) << 0.3, -0.6, -0.6).finished();
  const Vector xt = Vector::LinSpaced(7, -1.0, 1.0);
  const GpPosterior a = gp_posterior<double>(xc, yc, xt, k);
  const GpPosterior b = gp_posterior<double>(xd, yd, xt, k);
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("singular kernels raise an error naming the jitter") {
  RbfKernel k;
  k.jitter = 0.0;
  const Vector x = Vector::Constant(3, 0.1);
  try {
    gp_posterior<double>(x, Vector::Zero(3), x, k);
    FAIL("expected SingularKernelError");
  } catch (const SingularKernelError& e) {
    CHECK(e.jitter() == 0.0);
  }
}

TEST_CASE("prior samples: zero noise, single-point moments, covariance") {
  RbfKernel k;
  const GpPriorSampler s(Vector::LinSpaced(3, -0.3, 0.5), k);
  CHECK(s.from_noise(Vector::Zero(3)).isZero(0.0));

  Rng rng = make_rng(4);
  const GpPriorSampler one(Vector::Constant(1, 0.0), k);
  const int n = 100000;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) ss += std::pow(one.sample(rng)(0), 2);
  const double sd = std::sqrt(ss / n);
  CHECK(std::abs(sd - 1.0) < 3.0 / std::sqrt(2.0 * n));

  Matrix acc = Matrix::Zero(3, 3);
  std::vector<Vector> draws;
  for (int i = 0; i < n; ++i) {
    const Vector v = s.sample(rng);
    acc += v * v.transpose();
  }
  acc /= n;
  const Matrix km = gram_matrix<double>(s.grid(), k);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      const double se = std::sqrt((km(i, i) * km(j, j) + km(i, j) * km(i, j)) / n);
      CHECK(std::abs(acc(i, j) - km(i, j)) < 3.0 * se);
    }
}

TEST_CASE("warp_curve") {
  CHECK(warp_curve<double>(Vector::Zero(1), Vector::Zero(1))(0) == 0.0);
  CHECK(warp_curve<double>(Vector::Zero(1), Vector::Constant(1, M_PI / 2))(0) == 1.0);
  std::mt19937_64 rng(1);
  const Vector x = random_vec(50, rng, 3.0), y0 = random_vec(50, rng, 5.0);
  const Vector y = warp_curve<double>(x, y0);
  for (Index i = 0; i < 50; ++i) {
    CHECK(y(i) == std::sin(y0(i) + x(i)));
    CHECK(std::abs(y(i)) <= 1.0);
  }
  CHECK_THROWS_AS(warp_curve<double>(Vector::Zero(2), Vector::Zero(3)), DimensionError);
}

TEST_CASE("the oracle is generic over the scalar type") {
  BasicRbfKernel<long double> k;
  using V = GpVector<long double>;
  const V xc = (V(2) << -0.2L, 0.4L).finished(), yc = (V(2) << 1.0L, -0.5L).finished();
  const auto p = gp_posterior<long double>(xc, yc, xc, k);
  const GpPosterior d = gp_posterior<double>(xc.cast<double>(), yc.cast<double>(), xc.cast<double>(), RbfKernel{});
  CHECK(std::abs(static_cast<double>(p.mean(0)) - d.mean(0)) < 1e-9);
}
