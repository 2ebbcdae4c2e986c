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

// Independent straight-line implementations used as test oracles. They use
// explicit loops and plain std::vector accumulation, never the tape.

#ifndef NPLAB_TESTS_ORACLES_HPP
#define NPLAB_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nplab/gaussian.hpp"
#include "nplab/model.hpp"

namespace nplab::testing {

inline Matrix loop_dense(const Matrix& x, const Matrix& w, const Matrix& b, bool relu_out) {
  Matrix out(x.rows(), w.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      double acc = b(0, j);
      for (Index k = 0; k < x.cols(); ++k) acc += x(i, k) * w(k, j);
      out(i, j) = relu_out ? std::max(acc, 0.0) : acc;
    }
  }
  return out;
}

/// ReLU between layers; `relu_out` also on the last one.
inline Matrix loop_mlp(const ParameterSet& ps, const std::string& name, const Matrix& x, bool relu_out = false) {
  Matrix h = x;
  for (int l = 0;; ++l) {
    const std::string w = name + ".w" + std::to_string(l);
    if (!ps.count(w)) break;
    const bool last = !ps.count(name + ".w" + std::to_string(l + 1));
    h = loop_dense(h, ps.at(w), ps.at(name + ".b" + std::to_string(l)), last ? relu_out : true);
  }
  return h;
}

inline Matrix loop_hcat(const std::vector<Matrix>& parts) {
  Index cols = 0;
  for (const auto& p : parts) cols += p.cols();
  Matrix out(parts.front().rows(), cols);
  Index c = 0;
  for (const auto& p : parts) {
    for (Index i = 0; i < p.rows(); ++i)
      for (Index j = 0; j < p.cols(); ++j) out(i, c + j) = p(i, j);
    c += p.cols();
  }
  return out;
}

inline Matrix loop_rows(const Matrix& row, Index n) {
  Matrix out(n, row.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < row.cols(); ++j) out(i, j) = row(0, j);
  return out;
}

inline Matrix loop_encode(const NpModel& m, const Matrix& x, const Matrix& y) {
  if (x.rows() == 0) return m.params.at("null_context");
  const Matrix r = loop_mlp(m.params, "encoder", loop_hcat({x, y}));
  Matrix out = Matrix::Zero(1, r.cols());
  for (Index i = 0; i < r.rows(); ++i)
    for (Index j = 0; j < r.cols(); ++j) out(0, j) += r(i, j);
  return out / static_cast<double>(r.rows());
}

inline GaussianParams loop_split(const Matrix& head) {
  const Index d = head.cols() / 2;
  return {head.leftCols(d), head.rightCols(d)};
}

inline GaussianParams loop_global(const NpModel& m, const Matrix& r, bool posterior) {
  return loop_split(loop_mlp(m.params, posterior ? "global_post" : "global_prior", r));
}

inline Matrix loop_attention(const NpModel& m, const Matrix& xc, const Matrix& yc, const Matrix& xq) {
  const Matrix s = loop_mlp(m.params, "det_encoder", loop_hcat({xc, yc}));
  const Matrix q = loop_mlp(m.params, "attn_query", xq);
  const Matrix k = loop_mlp(m.params, "attn_key", xc);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Matrix out = Matrix::Zero(xq.rows(), s.cols());
  for (Index i = 0; i < xq.rows(); ++i) {
    std::vector<double> logit(static_cast<std::size_t>(xc.rows()));
    double mx = -1e300;
    for (Index n = 0; n < xc.rows(); ++n) {
      double acc = 0.0;
      for (Index d = 0; d < q.cols(); ++d) acc += q(i, d) * k(n, d);
      logit[static_cast<std::size_t>(n)] = acc * scale;
      mx = std::max(mx, acc * scale);
    }
    double z = 0.0;
    for (double& l : logit) z += (l = std::exp(l - mx));
    for (Index n = 0; n < xc.rows(); ++n)
      for (Index d = 0; d < s.cols(); ++d) out(i, d) += logit[static_cast<std::size_t>(n)] / z * s(n, d);
  }
  return out;
}

inline GaussianParams loop_local(const NpModel& m, const Matrix& zg, const Matrix& x, const Matrix* y) {
  const Matrix ex = loop_mlp(m.params, "embed_x", x, true);
  if (y) {
    const Matrix ey = loop_mlp(m.params, "embed_y", *y, true);
    return loop_split(loop_mlp(m.params, "local_post", loop_hcat({zg, ex, ey})));
  }
  return loop_split(loop_mlp(m.params, "local_prior", loop_hcat({zg, ex})));
}

inline GaussianParams loop_decode(const NpModel& m, const std::vector<Matrix>& latents, const Matrix& x) {
  std::vector<Matrix> parts{x};
  parts.insert(parts.end(), latents.begin(), latents.end());
  return loop_split(loop_mlp(m.params, "decoder", loop_hcat(parts)));
}

inline Matrix loop_sample(const GaussianParams& p, const Matrix& eps) {
  Matrix out(p.mean.rows(), p.mean.cols());
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = p.mean(i, j) + std_from_raw(p.log_std(i, j)) * eps(i, j);
  return out;
}

/// Mean over rows of the per-row NLL, evaluated term by term.
inline double loop_nll(const Matrix& y, const GaussianParams& p) {
  double total = 0.0;
  for (Index i = 0; i < y.rows(); ++i) {
    for (Index d = 0; d < y.cols(); ++d) {
      const double s = std_from_raw(p.log_std(i, d));
      const double z = (y(i, d) - p.mean(i, d)) / s;
      total += 0.5 * std::log(2.0 * M_PI) + std::log(s) + 0.5 * z * z;
    }
  }
  return total / static_cast<double>(y.rows());
}

inline double loop_kl(const GaussianParams& q, const GaussianParams& p, bool mean_rows) {
  double total = 0.0;
  for (Index i = 0; i < q.mean.rows(); ++i) {
    for (Index d = 0; d < q.mean.cols(); ++d) {
      const double sq = std_from_raw(q.log_std(i, d)), sp = std_from_raw(p.log_std(i, d));
      const double dm = q.mean(i, d) - p.mean(i, d);
      total += std::log(sp / sq) + (sq * sq + dm * dm) / (2 * sp * sp) - 0.5;
    }
  }
  return mean_rows ? total / static_cast<double>(q.mean.rows()) : total;
}

}  // namespace nplab::testing

#endif  // NPLAB_TESTS_ORACLES_HPP
