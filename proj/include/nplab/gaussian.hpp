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

// Diagonal Gaussians: the currency of every latent head and every decoder.
//
// A head emits (mean, log_std) where log_std is the raw output; the actual
// standard deviation is std_floor + softplus(log_std), so sigma stays
// strictly positive no matter what the network produces.

#ifndef NPLAB_GAUSSIAN_HPP
#define NPLAB_GAUSSIAN_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "nplab/autodiff.hpp"
#include "nplab/errors.hpp"

namespace nplab {

inline constexpr double kStdFloor = 1e-3;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

enum class Reduction { sum, mean_rows };

template <typename Scalar>
Scalar std_from_raw(Scalar raw) {
  using std::exp;
  using std::log1p;
  const Scalar sp = raw > Scalar(0) ? raw + log1p(exp(-raw)) : log1p(exp(raw));
  return Scalar(kStdFloor) + sp;
}

/// Inverse of std_from_raw; sigma must exceed the floor.
template <typename Scalar>
Scalar raw_from_std(Scalar sigma) {
  using std::expm1;
  using std::log;
  if (!(sigma > Scalar(kStdFloor))) throw ContractError("raw_from_std: sigma at or below the floor");
  return log(expm1(sigma - Scalar(kStdFloor)));
}

template <typename Scalar>
struct BasicGaussianParams {
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  MatrixType mean;
  MatrixType log_std;

  MatrixType stddev() const { return log_std.unaryExpr([](Scalar r) { return std_from_raw(r); }); }

  static BasicGaussianParams from_std(MatrixType mean, const MatrixType& sigma) {
    return {std::move(mean), sigma.unaryExpr([](Scalar s) { return raw_from_std(s); })};
  }
};

using GaussianParams = BasicGaussianParams<double>;

namespace detail {
template <typename A, typename B>
void require_same(const char* op, const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}
}  // namespace detail

/// Per-row negative log density, summed over columns.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gaussian_nll_rows(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& y,
    const BasicGaussianParams<Scalar>& p) {
  detail::require_same("gaussian_nll", y, p.mean);
  detail::require_same("gaussian_nll", p.mean, p.log_std);
  const auto sigma = p.stddev();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(y.rows());
  for (Index i = 0; i < y.rows(); ++i) {
    Scalar acc(0);
    for (Index d = 0; d < y.cols(); ++d) {
      const Scalar z = (y(i, d) - p.mean(i, d)) / sigma(i, d);
      acc += Scalar(kHalfLog2Pi) + std::log(sigma(i, d)) + Scalar(0.5) * z * z;
    }
    out(i) = acc;
  }
  return out;
}

template <typename Scalar>
Scalar gaussian_nll(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& y,
                    const BasicGaussianParams<Scalar>& p, Reduction red = Reduction::sum) {
  const auto rows = gaussian_nll_rows(y, p);
  Scalar s(0);
  for (Index i = 0; i < rows.size(); ++i) s += rows(i);
  return red == Reduction::sum ? s : s / Scalar(y.rows());
}

/// KL(q || p) per row, summed over columns. Non-negative.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> kl_diag_gaussian_rows(const BasicGaussianParams<Scalar>& q,
                                                               const BasicGaussianParams<Scalar>& p) {
  detail::require_same("kl_diag_gaussian", q.mean, p.mean);
  detail::require_same("kl_diag_gaussian", q.log_std, p.log_std);
  const auto sq = q.stddev();
  const auto sp = p.stddev();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(q.mean.rows());
  for (Index i = 0; i < q.mean.rows(); ++i) {
    Scalar acc(0);
    for (Index d = 0; d < q.mean.cols(); ++d) {
      const Scalar dm = q.mean(i, d) - p.mean(i, d);
      acc += std::log(sp(i, d) / sq(i, d)) +
             (sq(i, d) * sq(i, d) + dm * dm) / (Scalar(2) * sp(i, d) * sp(i, d)) - Scalar(0.5);
    }
    out(i) = acc;
  }
  return out;
}

template <typename Scalar>
Scalar kl_diag_gaussian(const BasicGaussianParams<Scalar>& q, const BasicGaussianParams<Scalar>& p,
                        Reduction red = Reduction::sum) {
  const auto rows = kl_diag_gaussian_rows(q, p);
  Scalar s(0);
  for (Index i = 0; i < rows.size(); ++i) s += rows(i);
  return red == Reduction::sum ? s : s / Scalar(q.mean.rows());
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reparameterize(
    const BasicGaussianParams<Scalar>& p, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& eps) {
  detail::require_same("reparameterize", p.mean, eps);
  return p.mean + p.stddev().cwiseProduct(eps);
}

/// A Gaussian living on a tape. `stddev` is derived from `log_std`.
struct GaussianNode {
  Var mean;
  Var log_std;
  Var stddev;

  GaussianParams values() const { return {mean.value(), log_std.value()}; }
};

GaussianNode make_gaussian(Var mean, Var log_std);
/// Splits a head output [mu | raw] of width 2d into a GaussianNode.
GaussianNode split_gaussian_head(Var head);

Var gaussian_nll(Var y, const GaussianNode& p, Reduction red = Reduction::sum);
/// Per-point squared error averaged over columns; the MSE-mode likelihood.
Var mean_squared_error(Var y, Var mean, Reduction red = Reduction::mean_rows);
Var kl_diag_gaussian(const GaussianNode& q, const GaussianNode& p, Reduction red = Reduction::sum);
/// mu + sigma * eps with eps held constant.
Var reparameterize(const GaussianNode& p, const Matrix& eps);

}  // namespace nplab

#endif  // NPLAB_GAUSSIAN_HPP
