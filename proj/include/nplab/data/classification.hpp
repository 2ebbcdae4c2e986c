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

// Three 2-D Gaussian blobs with one-hot labels, plus two out-of-distribution
// input sets: uniform noise over three times the data's bounding box, and a
// fourth blob centred between the classes.

#ifndef NPLAB_DATA_CLASSIFICATION_HPP
#define NPLAB_DATA_CLASSIFICATION_HPP

#include "nplab/autodiff.hpp"
#include "nplab/parameters.hpp"

namespace nplab::data {

struct BlobConfig {
  Matrix centres = (Matrix(3, 2) << 0.0, 3.0, -2.6, -1.5, 2.6, -1.5).finished();
  double blob_std = 0.6;
  RowVector ood_centre = RowVector::Zero(2);
};

class ToyClassification {
 public:
  explicit ToyClassification(const BlobConfig& cfg = {}) : cfg_(cfg) {}

  Index num_classes() const { return cfg_.centres.rows(); }
  /// n points with balanced-in-expectation labels; y is one-hot.
  void sample(Index n, Rng& rng, Matrix& x, Matrix& y) const;
  Matrix ood_uniform(Index n, Rng& rng) const;
  Matrix ood_blob(Index n, Rng& rng) const;

 private:
  BlobConfig cfg_;
};

}  // namespace nplab::data

#endif  // NPLAB_DATA_CLASSIFICATION_HPP
