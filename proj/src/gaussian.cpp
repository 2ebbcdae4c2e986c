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

#include "nplab/gaussian.hpp"

namespace nplab {

namespace {

Var reduce(Var total, Index rows, Reduction red) {
  return red == Reduction::sum ? total : (1.0 / static_cast<double>(rows)) * total;
}

void require_same(const char* op, Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch [" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + "] vs [" + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + "]");
  }
}

}  // namespace

GaussianNode make_gaussian(Var mean, Var log_std) {
  require_same("make_gaussian", mean, log_std);
  return {mean, log_std, softplus(log_std) + kStdFloor};
}

GaussianNode split_gaussian_head(Var head) {
  if (head.cols() % 2 != 0) throw DimensionError("gaussian head width must be even");
  const Index d = head.cols() / 2;
  return make_gaussian(slice_cols(head, 0, d), slice_cols(head, d, d));
}

Var gaussian_nll(Var y, const GaussianNode& p, Reduction red) {
  require_same("gaussian_nll", y, p.mean);
  Var z = cwise_quotient(y - p.mean, p.stddev);
  Var per = log(p.stddev) + 0.5 * square(z);
  Var total = sum(per) + kHalfLog2Pi * static_cast<double>(y.value().size());
  return reduce(total, y.rows(), red);
}

Var mean_squared_error(Var y, Var mean, Reduction red) {
  require_same("mean_squared_error", y, mean);
  Var total = (1.0 / static_cast<double>(y.cols())) * sum(square(y - mean));
  return reduce(total, y.rows(), red);
}

Var kl_diag_gaussian(const GaussianNode& q, const GaussianNode& p, Reduction red) {
  require_same("kl_diag_gaussian", q.mean, p.mean);
  Var ratio = log(p.stddev) - log(q.stddev);
  Var num = square(q.stddev) + square(q.mean - p.mean);
  Var quad = cwise_quotient(num, 2.0 * square(p.stddev));
  Var total = sum(ratio + quad) + (-0.5 * static_cast<double>(q.mean.value().size()));
  return reduce(total, q.mean.rows(), red);
}

Var reparameterize(const GaussianNode& p, const Matrix& eps) {
  if (eps.rows() != p.mean.rows() || eps.cols() != p.mean.cols()) {
    throw DimensionError("reparameterize: eps shape mismatch");
  }
  Var e = p.mean.tape()->constant(eps);
  return p.mean + cwise_product(p.stddev, e);
}

}  // namespace nplab
