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

#include "nplab/data/classification.hpp"

#include <random>

namespace nplab::data {

void ToyClassification::sample(Index n, Rng& rng, Matrix& x, Matrix& y) const {
  std::uniform_int_distribution<Index> cls(0, num_classes() - 1);
  std::normal_distribution<double> noise(0.0, cfg_.blob_std);
  x.resize(n, 2);
  y = Matrix::Zero(n, num_classes());
  for (Index i = 0; i < n; ++i) {
    const Index c = cls(rng);
    x(i, 0) = cfg_.centres(c, 0) + noise(rng);
    x(i, 1) = cfg_.centres(c, 1) + noise(rng);
    y(i, c) = 1.0;
  }
}

Matrix ToyClassification::ood_uniform(Index n, Rng& rng) const {
  const RowVector lo = cfg_.centres.colwise().minCoeff().array() - 3.0 * cfg_.blob_std;
  const RowVector hi = cfg_.centres.colwise().maxCoeff().array() + 3.0 * cfg_.blob_std;
  const RowVector mid = 0.5 * (lo + hi), half = 1.5 * (hi - lo);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix x(n, 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < 2; ++j) x(i, j) = mid(j) + half(j) * u(rng);
  return x;
}

Matrix ToyClassification::ood_blob(Index n, Rng& rng) const {
  std::normal_distribution<double> noise(0.0, cfg_.blob_std);
  Matrix x(n, 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < 2; ++j) x(i, j) = cfg_.ood_centre(j) + noise(rng);
  return x;
}

}  // namespace nplab::data
