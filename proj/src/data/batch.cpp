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

#include "nplab/data/batch.hpp"

#include <algorithm>
#include <numeric>

#include "nplab/errors.hpp"

namespace nplab::data {

ContextTargetBatch split_context(const Matrix& x, const Matrix& y, const std::vector<Index>& context_rows,
                                 Variant variant) {
  if (x.rows() != y.rows()) throw DimensionError("split_context: x/y row counts differ");
  std::vector<char> in_ctx(static_cast<std::size_t>(x.rows()), 0);
  for (Index r : context_rows) {
    if (r < 0 || r >= x.rows() || in_ctx[static_cast<std::size_t>(r)]) {
      throw ContractError("split_context: context rows must be distinct valid indices");
    }
    in_ctx[static_cast<std::size_t>(r)] = 1;
  }
  std::vector<Index> order(context_rows.begin(), context_rows.end());
  for (Index r = 0; r < x.rows(); ++r)
    if (!in_ctx[static_cast<std::size_t>(r)]) order.push_back(r);

  const auto n_c = static_cast<Index>(context_rows.size());
  const bool cnp = variant == Variant::cnp;
  const Index first_target = cnp ? n_c : 0;
  const Index m = x.rows() - first_target;
  ContextTargetBatch b;
  b.context_in_target = !cnp;
  b.x_context.resize(n_c, x.cols());
  b.y_context.resize(n_c, y.cols());
  b.x_target.resize(m, x.cols());
  b.y_target.resize(m, y.cols());
  for (Index i = 0; i < n_c; ++i) {
    b.x_context.row(i) = x.row(order[static_cast<std::size_t>(i)]);
    b.y_context.row(i) = y.row(order[static_cast<std::size_t>(i)]);
  }
  for (Index i = 0; i < m; ++i) {
    b.x_target.row(i) = x.row(order[static_cast<std::size_t>(first_target + i)]);
    b.y_target.row(i) = y.row(order[static_cast<std::size_t>(first_target + i)]);
  }
  return b;
}

ContextTargetBatch make_batch(const Matrix& x, const Matrix& y, Index batch_size, Index n_max,
                              Variant variant, Rng& rng) {
  if (x.rows() != y.rows()) throw DimensionError("make_batch: x/y row counts differ");
  if (batch_size < 1 || batch_size > x.rows()) throw ContractError("make_batch: batch size outside [1, rows]");
  if (n_max < 1 || n_max > batch_size) throw ContractError("make_batch: n_max outside [1, batch size]");
  if (variant == Variant::cnp && batch_size < 2) throw ContractError("make_batch: CNP needs batch size >= 2");

  std::vector<Index> idx(static_cast<std::size_t>(x.rows()));
  std::iota(idx.begin(), idx.end(), Index{0});
  // partial Fisher-Yates: the first batch_size entries are a uniform sample
  for (Index i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<Index> pick(i, x.rows() - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  const Index cap = variant == Variant::cnp ? std::min(n_max, batch_size - 1) : n_max;
  std::uniform_int_distribution<Index> nc_dist(1, cap);
  const Index n_c = nc_dist(rng);

  Matrix bx(batch_size, x.cols()), by(batch_size, y.cols());
  for (Index i = 0; i < batch_size; ++i) {
    bx.row(i) = x.row(idx[static_cast<std::size_t>(i)]);
    by.row(i) = y.row(idx[static_cast<std::size_t>(i)]);
  }
  std::vector<Index> ctx(static_cast<std::size_t>(n_c));
  std::iota(ctx.begin(), ctx.end(), Index{0});
  return split_context(bx, by, ctx, variant);
}

ContextTargetBatch make_batch(const TabularDataset& ds, Index batch_size, Index n_max, Variant variant,
                              Rng& rng) {
  return make_batch(ds.inputs, ds.outputs, batch_size, n_max, variant, rng);
}

}  // namespace nplab::data
