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

#include "nplab/autodiff.hpp"

#include <cmath>
#include <string>

#include "nplab/errors.hpp"

namespace nplab {

namespace {

std::string shape_str(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

void require_same_shape(const char* op, Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.value()) +
                         " vs " + shape_str(b.value()));
  }
}

Tape& tape_of(Var a) {
  if (!a.valid()) throw ContractError("operation on an unbound Var");
  return *a.tape();
}

Tape& tape_of(Var a, Var b) {
  if (a.tape() != b.tape()) throw ContractError("operands live on different tapes");
  return tape_of(a);
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw ContractError("scalar() on non-scalar node " + shape_str(v));
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), true, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape() != this) throw ContractError("input recorded on another tape");
    needs = needs || nodes_[in.id()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Matrix(), needs, needs ? std::move(fn) : nullptr});
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(Var v, const Matrix& contribution) {
  Node& n = nodes_[v.id()];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = contribution;
  } else {
    n.grad += contribution;
  }
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
  if (nodes_[loss.id()].value.size() != 1) {
    throw ContractError("backward: loss must be 1x1, got " + shape_str(nodes_[loss.id()].value));
  }
  if (swept_) throw ContractError("backward: tape already swept");
  swept_ = true;
  nodes_[loss.id()].grad = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0 || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::append_kinks(const Matrix& pre_activation) {
  for (Index i = 0; i < pre_activation.size(); ++i) {
    kinks_.push_back(pre_activation.data()[i] > 0.0 ? 1 : 0);
  }
}

Var operator+(Var a, Var b) {
  require_same_shape("add", a, b);
  Tape& t = tape_of(a, b);
  return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var operator-(Var a, Var b) {
  require_same_shape("sub", a, b);
  Tape& t = tape_of(a, b);
  return t.record(a.value() - b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, -g);
  });
}

Var operator-(Var a) {
  Tape& t = tape_of(a);
  return t.record(-a.value(), {a}, [a](Tape& tp, const Matrix& g) { tp.accumulate(a, -g); });
}

Var operator*(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions " + shape_str(a.value()) + " * " +
                         shape_str(b.value()));
  }
  Tape& t = tape_of(a, b);
  Matrix out;
  out.noalias() = a.value() * b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var operator*(double s, Var a) {
  Tape& t = tape_of(a);
  return t.record(s * a.value(), {a}, [a, s](Tape& tp, const Matrix& g) { tp.accumulate(a, s * g); });
}

Var operator+(Var a, double s) {
  Tape& t = tape_of(a);
  return t.record(a.value().array() + s, {a}, [a](Tape& tp, const Matrix& g) { tp.accumulate(a, g); });
}

Var cwise_product(Var a, Var b) {
  require_same_shape("cwise_product", a, b);
  Tape& t = tape_of(a, b);
  return t.record(a.value().cwiseProduct(b.value()), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g.cwiseProduct(b.value()));
    if (tp.requires_grad(b)) tp.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var cwise_quotient(Var a, Var b) {
  require_same_shape("cwise_quotient", a, b);
  Tape& t = tape_of(a, b);
  return t.record(a.value().cwiseQuotient(b.value()), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    const Matrix& bv = b.value();
    if (tp.requires_grad(a)) tp.accumulate(a, g.cwiseQuotient(bv));
    if (tp.requires_grad(b)) {
      tp.accumulate(b, -(g.array() * a.value().array() / bv.array().square()).matrix());
    }
  });
}

Var add_rowwise(Var m, Var row) {
  if (row.rows() != 1 || row.cols() != m.cols()) {
    throw DimensionError("add_rowwise: row " + shape_str(row.value()) + " vs matrix " +
                         shape_str(m.value()));
  }
  Tape& t = tape_of(m, row);
  Matrix out = m.value().rowwise() + row.value().row(0);
  return t.record(std::move(out), {m, row}, [m, row](Tape& tp, const Matrix& g) {
    tp.accumulate(m, g);
    if (tp.requires_grad(row)) tp.accumulate(row, g.colwise().sum());
  });
}

Var affine(Var x, Var w, Var b) {
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    throw DimensionError("affine: x " + shape_str(x.value()) + ", w " + shape_str(w.value()) +
                         ", b " + shape_str(b.value()));
  }
  Tape& t = tape_of(x, w);
  Matrix out;
  out.noalias() = x.value() * w.value();
  out.rowwise() += b.value().row(0);
  return t.record(std::move(out), {x, w, b}, [x, w, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(x)) tp.accumulate(x, g * w.value().transpose());
    if (tp.requires_grad(w)) tp.accumulate(w, x.value().transpose() * g);
    if (tp.requires_grad(b)) tp.accumulate(b, g.colwise().sum());
  });
}

Var relu(Var a) {
  Tape& t = tape_of(a);
  if (t.record_kinks()) t.append_kinks(a.value());
  return t.record(a.value().cwiseMax(0.0), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, (a.value().array() > 0.0).select(g.array(), 0.0).matrix());
  });
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Var softplus(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().unaryExpr([](double x) { return softplus(x); });
  return t.record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    // d softplus / dx = sigmoid(x)
    Matrix sig = a.value().unaryExpr([](double x) {
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
    tp.accumulate(a, g.cwiseProduct(sig));
  });
}

Var exp(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().array().exp();
  Matrix e = out;
  return t.record(std::move(out), {a}, [a, e](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.cwiseProduct(e));
  });
}

Var log(Var a) {
  Tape& t = tape_of(a);
  return t.record(a.value().array().log(), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.cwiseQuotient(a.value()));
  });
}

Var square(Var a) {
  Tape& t = tape_of(a);
  return t.record(a.value().array().square(), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, 2.0 * g.cwiseProduct(a.value()));
  });
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  const Index r = a.rows(), c = a.cols();
  // fixed sequential order over the flat index
  double s = 0.0;
  const double* d = a.value().data();
  for (Index i = 0; i < a.value().size(); ++i) s += d[i];
  return t.record(Matrix::Constant(1, 1, s), {a}, [a, r, c](Tape& tp, const Matrix& g) {
    tp.accumulate(a, Matrix::Constant(r, c, g(0, 0)));
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ContractError("mean of empty node");
  return (1.0 / n) * sum(a);
}

Var colwise_mean(Var a) {
  Tape& t = tape_of(a);
  const Index r = a.rows();
  if (r == 0) throw ContractError("colwise_mean over zero rows");
  RowVector acc = RowVector::Zero(a.cols());
  for (Index i = 0; i < r; ++i) acc += a.value().row(i);
  acc /= static_cast<double>(r);
  Matrix out = acc;
  return t.record(std::move(out), {a}, [a, r](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.replicate(r, 1) / static_cast<double>(r));
  });
}

Var rowwise_sum(Var a) {
  Tape& t = tape_of(a);
  const Index c = a.cols();
  Matrix out = Matrix::Zero(a.rows(), 1);
  for (Index j = 0; j < c; ++j) out.col(0) += a.value().col(j);
  return t.record(std::move(out), {a}, [a, c](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.replicate(1, c));
  });
}

Var hconcat(std::initializer_list<Var> parts) {
  return hconcat(std::span<const Var>(parts.begin(), parts.size()));
}

Var hconcat(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("hconcat of nothing");
  Tape& t = tape_of(parts.front());
  const Index r = parts.front().rows();
  Index c = 0;
  for (const Var& p : parts) {
    if (p.rows() != r) {
      throw DimensionError("hconcat: row count " + std::to_string(p.rows()) + " vs " +
                           std::to_string(r));
    }
    c += p.cols();
  }
  Matrix out(r, c);
  std::vector<Var> inputs(parts.begin(), parts.end());
  std::vector<Index> offsets;
  Index off = 0;
  for (const Var& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    offsets.push_back(off);
    off += p.cols();
  }
  return t.record(std::move(out), parts, [inputs, offsets](Tape& tp, const Matrix& g) {
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (tp.requires_grad(inputs[k])) {
        tp.accumulate(inputs[k], g.middleCols(offsets[k], inputs[k].cols()));
      }
    }
  });
}

Var replicate_rows(Var row, Index n) {
  if (row.rows() != 1) throw DimensionError("replicate_rows: expected a single row, got " + shape_str(row.value()));
  Tape& t = tape_of(row);
  return t.record(row.value().replicate(n, 1), {row}, [row](Tape& tp, const Matrix& g) {
    tp.accumulate(row, g.colwise().sum());
  });
}

Var slice_cols(Var a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", +" + std::to_string(count) +
                         ") out of " + shape_str(a.value()));
  }
  Tape& t = tape_of(a);
  const Index r = a.rows(), c = a.cols();
  return t.record(a.value().middleCols(start, count), {a},
                  [a, start, count, r, c](Tape& tp, const Matrix& g) {
                    Matrix full = Matrix::Zero(r, c);
                    full.middleCols(start, count) = g;
                    tp.accumulate(a, full);
                  });
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  return t.record(a.value().transpose(), {a},
                  [a](Tape& tp, const Matrix& g) { tp.accumulate(a, g.transpose()); });
}

Var softmax_rows(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value();
  for (Index i = 0; i < out.rows(); ++i) {
    const double m = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - m).exp();
    out.row(i) /= out.row(i).sum();
  }
  Matrix p = out;
  return t.record(std::move(out), {a}, [a, p](Tape& tp, const Matrix& g) {
    // dL/da = p * (g - <g, p>) per row
    Vector inner = g.cwiseProduct(p).rowwise().sum();
    Matrix grad = p.cwiseProduct(g - inner.replicate(1, g.cols()));
    tp.accumulate(a, grad);
  });
}

Var log_softmax_rows(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value();
  for (Index i = 0; i < out.rows(); ++i) {
    const double m = out.row(i).maxCoeff();
    const double lse = m + std::log((out.row(i).array() - m).exp().sum());
    out.row(i).array() -= lse;
  }
  Matrix p = out.array().exp();
  return t.record(std::move(out), {a}, [a, p](Tape& tp, const Matrix& g) {
    Vector total = g.rowwise().sum();
    tp.accumulate(a, g - p.cwiseProduct(total.replicate(1, g.cols())));
  });
}

}  // namespace nplab
