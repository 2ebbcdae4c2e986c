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

// Reverse-mode differentiation over dense row-major-by-convention matrices.
//
// A Tape records primitive operations in execution order; every recorded
// node keeps its forward value and a closure that pushes the incoming
// adjoint onto its inputs. Rows index set elements (context or target
// points), columns index features.

#ifndef NPLAB_AUTODIFF_HPP
#define NPLAB_AUTODIFF_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace nplab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  /// Pushes `upstream` (the adjoint of the node's output) into input adjoints.
  using BackwardFn = std::function<void(Tape&, const Matrix& upstream)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Node that never receives a gradient.
  Var constant(Matrix value);
  /// Differentiable leaf (a parameter or an input we want d/dx of).
  Var leaf(Matrix value);

  /// Records an interior node. `inputs` decide whether the node needs a
  /// gradient at all; constant-only subgraphs skip their backward closure.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Matrix value, std::span<const Var> inputs, BackwardFn fn);

  /// Single reverse sweep from a 1x1 node. Throws ContractError if the loss
  /// is not scalar or the tape was already swept.
  void backward(Var loss);

  /// Adjoint of a node after backward(); zeros if the node was unreachable.
  Matrix grad(Var v) const;

  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  std::size_t size() const { return nodes_.size(); }

  /// Adds `contribution` to the adjoint of `v` (used by backward closures).
  void accumulate(Var v, const Matrix& contribution);

  /// When enabled, every relu call appends its active/inactive pattern.
  /// Finite-difference checks compare patterns to detect kink crossings.
  void set_record_kinks(bool on) { record_kinks_ = on; }
  bool record_kinks() const { return record_kinks_; }
  void append_kinks(const Matrix& pre_activation);
  const std::vector<std::uint8_t>& kink_pattern() const { return kinks_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool swept_ = false;
  bool record_kinks_ = false;
  std::vector<std::uint8_t> kinks_;
};

// Arithmetic. Shapes must match exactly unless noted; mismatches throw
// DimensionError naming the operation.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator-(Var a);
Var operator*(Var a, Var b);  // matrix product
Var operator*(double s, Var a);
Var operator+(Var a, double s);

Var cwise_product(Var a, Var b);
Var cwise_quotient(Var a, Var b);
/// m.rowwise() + row, with `row` a 1 x cols node.
Var add_rowwise(Var m, Var row);
/// x * w + b (b broadcast over rows).
Var affine(Var x, Var w, Var b);

Var relu(Var a);
Var softplus(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);

Var sum(Var a);            // 1x1
Var mean(Var a);           // 1x1
Var colwise_mean(Var a);   // 1 x cols, mean over rows (set pooling)
Var rowwise_sum(Var a);    // rows x 1

Var hconcat(std::span<const Var> parts);
Var hconcat(std::initializer_list<Var> parts);
/// Stacks a 1 x c row `n` times.
Var replicate_rows(Var row, Index n);
Var slice_cols(Var a, Index start, Index count);
Var transpose(Var a);

Var softmax_rows(Var a);
Var log_softmax_rows(Var a);

/// Numerically stable softplus on plain values.
double softplus(double x);

}  // namespace nplab

#endif  // NPLAB_AUTODIFF_HPP
