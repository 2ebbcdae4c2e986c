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

#include "nplab/data/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nplab/errors.hpp"
#include "nplab/parameters.hpp"

namespace nplab::data {

ColumnStats ColumnStats::fit(const Matrix& m) {
  if (m.rows() == 0) throw ContractError("ColumnStats::fit: empty matrix");
  ColumnStats s;
  s.mean = m.colwise().mean();
  s.std.resize(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double var = (m.col(j).array() - s.mean(j)).square().mean();
    const double sd = std::sqrt(var);
    s.std(j) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))) ? sd : 1.0;
  }
  return s;
}

ColumnStats ColumnStats::identity(Index cols) { return {RowVector::Zero(cols), RowVector::Ones(cols)}; }

Matrix ColumnStats::apply(const Matrix& m) const {
  if (m.cols() != mean.size()) throw DimensionError("standardize: column count mismatch");
  return (m.rowwise() - mean).array().rowwise() / std.array();
}

Matrix ColumnStats::invert(const Matrix& m) const {
  if (m.cols() != mean.size()) throw DimensionError("destandardize: column count mismatch");
  return (m.array().rowwise() * std.array()).matrix().rowwise() + mean;
}

namespace {

Matrix take_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

TabularSplit standardize_split(const Matrix& inputs, const Matrix& outputs,
                               const std::vector<Index>& train_rows, const std::vector<Index>& test_rows) {
  if (inputs.rows() != outputs.rows()) throw DimensionError("standardize_split: row counts differ");
  TabularSplit s;
  s.train_rows = train_rows;
  s.test_rows = test_rows;
  const Matrix xi = take_rows(inputs, train_rows), yi = take_rows(outputs, train_rows);
  const ColumnStats sx = ColumnStats::fit(xi), sy = ColumnStats::fit(yi);
  s.train = {sx.apply(xi), sy.apply(yi), sx, sy, "train"};
  s.test = {sx.apply(take_rows(inputs, test_rows)), sy.apply(take_rows(outputs, test_rows)), sx, sy, "test"};
  return s;
}

void random_split(Index n, double train_fraction, std::uint64_t seed, std::vector<Index>& train,
                  std::vector<Index>& test) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng = make_rng(seed, 0x5b1);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
}

Matrix parse_numeric_csv(const std::string& text, Index cols, bool has_header) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  Index rows = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    Index count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      std::string_view cell = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric cell '" + std::string(cell) + "'");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (count != cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                       " columns, found " + std::to_string(count));
    }
    ++rows;
  }
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  return out;
}

TabularSplit load_csv_text(const std::string& text, Index dx, Index dy, const CsvOptions& opt) {
  if (dx < 1 || dy < 1) throw ConfigError("load_csv: dx and dy must be >= 1");
  const Matrix table = parse_numeric_csv(text, dx + dy, opt.has_header);
  if (table.rows() < 2) throw ParseError("csv has fewer than 2 data rows");
  std::vector<Index> train, test;
  random_split(table.rows(), opt.train_fraction, opt.split_seed, train, test);
  return standardize_split(table.leftCols(dx), table.rightCols(dy), train, test);
}

TabularSplit load_csv(const std::string& path, Index dx, Index dy, const CsvOptions& opt) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_csv_text(ss.str(), dx, dy, opt);
}

}  // namespace nplab::data
