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

// Exact Gaussian-process regression with an RBF kernel over a 1-D index
// set. Used both as a data source (warped curves) and as a correctness
// oracle for the permutation properties of the predictive distribution.

#ifndef NPLAB_GP_HPP
#define NPLAB_GP_HPP

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "nplab/errors.hpp"

namespace nplab {

template <typename Scalar>
using GpVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using GpMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct BasicRbfKernel {
  Scalar length_scale = Scalar(0.4);
  Scalar signal_std = Scalar(1.0);
  Scalar jitter = Scalar(1e-6);

  void validate() const {
    if (!(length_scale > 0) || !(signal_std > 0) || !(jitter >= 0)) {
      throw ConfigError("rbf kernel: need length_scale > 0, signal_std > 0, jitter >= 0");
    }
  }
  Scalar operator()(Scalar a, Scalar b) const {
    const Scalar d = a - b;
    return signal_std * signal_std * std::exp(-d * d / (Scalar(2) * length_scale * length_scale));
  }
};

using RbfKernel = BasicRbfKernel<double>;

/// K[i][j] = k(a_i, b_j). No jitter; see gram_matrix for the square case.
template <typename Scalar>
GpMatrix<Scalar> kernel_matrix(const GpVector<Scalar>& a, const GpVector<Scalar>& b,
                               const BasicRbfKernel<Scalar>& k) {
  GpMatrix<Scalar> out(a.size(), b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j)
    for (Eigen::Index i = 0; i < a.size(); ++i) out(i, j) = k(a(i), b(j));
  return out;
}

/// k(a, a) + jitter I.
template <typename Scalar>
GpMatrix<Scalar> gram_matrix(const GpVector<Scalar>& a, const BasicRbfKernel<Scalar>& k) {
  GpMatrix<Scalar> out = kernel_matrix(a, a, k);
  out.diagonal().array() += k.jitter;
  return out;
}

template <typename Scalar>
Eigen::LLT<GpMatrix<Scalar>> checked_cholesky(const GpMatrix<Scalar>& m, Scalar jitter) {
  Eigen::LLT<GpMatrix<Scalar>> llt(m);
  if (llt.info() != Eigen::Success || !llt.matrixL().toDenseMatrix().allFinite()) {
    throw SingularKernelError("cholesky failed on kernel matrix", static_cast<double>(jitter));
  }
  return llt;
}

template <typename Scalar>
struct BasicGpPosterior {
  GpVector<Scalar> mean;
  GpMatrix<Scalar> cov;

  GpVector<Scalar> variance() const { return cov.diagonal(); }
};

using GpPosterior = BasicGpPosterior<double>;

/// Conditional of the GP at x_t given noisy observations (x_c, y_c):
///   mean = m(x_t) + K_tc (K_cc + s^2 I)^-1 (y_c - m(x_c))
///   cov  = K_tt - K_tc (K_cc + s^2 I)^-1 K_ct
/// computed with Cholesky solves. Jitter enters K_cc only.
template <typename Scalar>
BasicGpPosterior<Scalar> gp_posterior(const GpVector<Scalar>& x_c, const GpVector<Scalar>& y_c,
                                      const GpVector<Scalar>& x_t, const BasicRbfKernel<Scalar>& k,
                                      Scalar noise_std = Scalar(0),
                                      const std::function<Scalar(Scalar)>& mean_fn = {}) {
  k.validate();
  if (x_c.size() != y_c.size()) throw DimensionError("gp_posterior: x_c and y_c sizes differ");
  auto m = [&](Scalar x) { return mean_fn ? mean_fn(x) : Scalar(0); };
  BasicGpPosterior<Scalar> post;
  post.mean = x_t.unaryExpr(m);
  post.cov = kernel_matrix(x_t, x_t, k);
  if (x_c.size() == 0) return post;

  GpMatrix<Scalar> kcc = gram_matrix(x_c, k);
  kcc.diagonal().array() += noise_std * noise_std;
  const auto llt = checked_cholesky(kcc, k.jitter);
  const GpMatrix<Scalar> kct = kernel_matrix(x_c, x_t, k);
  const GpVector<Scalar> resid = y_c - x_c.unaryExpr(m);
  post.mean += kct.transpose() * llt.solve(resid);
  const GpMatrix<Scalar> v = llt.matrixL().solve(kct);
  post.cov -= v.transpose() * v;
  post.cov = (Scalar(0.5) * (post.cov + post.cov.transpose())).eval();
  return post;
}

/// Draws y0 = L eps on a fixed grid; L is factored once.
template <typename Scalar>
class BasicGpPriorSampler {
 public:
  BasicGpPriorSampler(GpVector<Scalar> grid, const BasicRbfKernel<Scalar>& k) : grid_(std::move(grid)) {
    k.validate();
    chol_ = checked_cholesky(gram_matrix(grid_, k), k.jitter).matrixL();
  }

  const GpVector<Scalar>& grid() const { return grid_; }
  GpVector<Scalar> from_noise(const GpVector<Scalar>& eps) const {
    if (eps.size() != grid_.size()) throw DimensionError("gp prior: noise length != grid length");
    return chol_.template triangularView<Eigen::Lower>() * eps;
  }
  template <typename Rng>
  GpVector<Scalar> sample(Rng& rng) const {
    std::normal_distribution<Scalar> n(Scalar(0), Scalar(1));
    GpVector<Scalar> eps(grid_.size());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = n(rng);
    return from_noise(eps);
  }

 private:
  GpVector<Scalar> grid_;
  GpMatrix<Scalar> chol_;
};

using GpPriorSampler = BasicGpPriorSampler<double>;

template <typename Scalar, typename Rng>
GpVector<Scalar> sample_gp_prior(const GpVector<Scalar>& grid, const BasicRbfKernel<Scalar>& k, Rng& rng) {
  return BasicGpPriorSampler<Scalar>(grid, k).sample(rng);
}

/// y_i = sin(y0_i + x_i).
template <typename Scalar>
GpVector<Scalar> warp_curve(const GpVector<Scalar>& x, const GpVector<Scalar>& y0) {
  if (x.size() != y0.size()) throw DimensionError("warp_curve: x and y0 sizes differ");
  GpVector<Scalar> y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = std::sin(y0(i) + x(i));
  return y;
}

/// n evenly spaced points on [lo, hi].
inline GpVector<double> even_grid(double lo, double hi, Eigen::Index n) {
  return GpVector<double>::LinSpaced(n, lo, hi);
}

}  // namespace nplab

#endif  // NPLAB_GP_HPP
