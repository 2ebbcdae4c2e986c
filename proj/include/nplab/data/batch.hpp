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

// Context/target sampling: draw a mini-batch of B rows, pick N_C uniformly
// on {1..n_max}, and take the first N_C shuffled rows as the context.

#ifndef NPLAB_DATA_BATCH_HPP
#define NPLAB_DATA_BATCH_HPP

#include "nplab/data/tabular.hpp"
#include "nplab/model.hpp"
#include "nplab/objectives.hpp"

namespace nplab::data {

/// B rows drawn without replacement from (x, y). For CNP the targets are
/// the B - N_C non-context rows, so N_C is capped at B - 1; otherwise the
/// targets are all B rows with the context first.
ContextTargetBatch make_batch(const Matrix& x, const Matrix& y, Index batch_size, Index n_max,
                              Variant variant, Rng& rng);

ContextTargetBatch make_batch(const TabularDataset& ds, Index batch_size, Index n_max, Variant variant,
                              Rng& rng);

/// Fixed split: the given rows are the context and the target set follows
/// the variant convention over all rows.
ContextTargetBatch split_context(const Matrix& x, const Matrix& y, const std::vector<Index>& context_rows,
                                 Variant variant);

}  // namespace nplab::data

#endif  // NPLAB_DATA_BATCH_HPP
