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

// Row-record datasets, column standardisation, and the CSV reader.

#ifndef NPLAB_DATA_TABULAR_HPP
#define NPLAB_DATA_TABULAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nplab/autodiff.hpp"

namespace nplab::data {

/// Per-column affine map to zero mean / unit std. Constant columns get std 1.
struct ColumnStats {
  RowVector mean;
  RowVector std;

  static ColumnStats fit(const Matrix& m);
  static ColumnStats identity(Index cols);
  Matrix apply(const Matrix& m) const;
  Matrix invert(const Matrix& m) const;
};

struct TabularDataset {
  Matrix inputs;   // n x dx, standardised
  Matrix outputs;  // n x dy, standardised
  ColumnStats input_stats;
  ColumnStats output_stats;
  std::string split = "train";

  Index size() const { return inputs.rows(); }
  Index dx() const { return inputs.cols(); }
  Index dy() const { return outputs.cols(); }
};

/// Fits stats on `train_in/out` and applies them to both.
struct TabularSplit {
  TabularDataset train;
  TabularDataset test;
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
};

TabularSplit standardize_split(const Matrix& inputs, const Matrix& outputs,
                               const std::vector<Index>& train_rows, const std::vector<Index>& test_rows);

/// Random partition of 0..n-1 with round(n * train_fraction) training rows.
void random_split(Index n, double train_fraction, std::uint64_t seed, std::vector<Index>& train,
                  std::vector<Index>& test);

struct CsvOptions {
  bool has_header = false;
  double train_fraction = 0.5;
  std::uint64_t split_seed = 0;
};

/// Numeric table; every row must have exactly `cols` cells. Errors carry the
/// 1-based line number.
Matrix parse_numeric_csv(const std::string& text, Index cols, bool has_header);

/// First dx columns are inputs, the next dy outputs.
TabularSplit load_csv(const std::string& path, Index dx, Index dy, const CsvOptions& opt = {});
TabularSplit load_csv_text(const std::string& text, Index dx, Index dy, const CsvOptions& opt = {});

}  // namespace nplab::data

#endif  // NPLAB_DATA_TABULAR_HPP
