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

#include "nplab/parameters.hpp"

#include <cmath>

#include "nplab/errors.hpp"

namespace nplab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

Var Binder::operator()(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  auto p = params_->find(name);
  if (p == params_->end()) throw ContractError("unknown parameter '" + name + "'");
  Var v = differentiable_ ? tape_->leaf(p->second) : tape_->constant(p->second);
  bound_.emplace(name, v);
  return v;
}

Gradients Binder::gradients() const {
  Gradients out;
  for (const auto& [name, value] : *params_) {
    auto it = bound_.find(name);
    out[name] = it == bound_.end() ? Matrix::Zero(value.rows(), value.cols()) : tape_->grad(it->second);
  }
  return out;
}

Matrix init_weight(Index fan_in, Index fan_out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix w(fan_in, fan_out);
  // column-major fill order is part of the seed contract
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  return w;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace nplab
