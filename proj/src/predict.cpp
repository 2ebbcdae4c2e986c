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

#include "nplab/predict.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "nplab/errors.hpp"

namespace nplab {

namespace {

Matrix standard_normal(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

void check_inputs(const NpModel& model, const Matrix& xc, const Matrix& yc, const Matrix& xq) {
  const ModelDims& d = model.dims;
  if (xc.rows() != yc.rows()) throw DimensionError("predict: context x/y row counts differ");
  if ((xc.rows() > 0 && (xc.cols() != d.dx || yc.cols() != d.dy)) || xq.cols() != d.dx) {
    throw DimensionError("predict: input widths do not match model (dx=" + std::to_string(d.dx) +
                         ", dy=" + std::to_string(d.dy) + ")");
  }
}

struct Pass {
  Tape tape;
  ModelGraph g;
  explicit Pass(const NpModel& model) : g(model, tape, false) {}
};

// Raw decoder outputs, one per latent sample. A null noise pointer selects
// the prior means everywhere.
std::vector<Matrix> decoder_heads(const NpModel& model, const Matrix& xc_m, const Matrix& yc_m,
                                  const Matrix& xq_m, const NoiseSet* noise) {
  check_inputs(model, xc_m, yc_m, xq_m);
  const Index m = xq_m.rows();
  Tape tape;
  ModelGraph g(model, tape, false);
  Matrix xc_safe = xc_m.rows() > 0 ? xc_m : Matrix(0, model.dims.dx);
  Matrix yc_safe = yc_m.rows() > 0 ? yc_m : Matrix(0, model.dims.dy);
  Var xc = tape.constant(xc_safe), yc = tape.constant(yc_safe), xq = tape.constant(xq_m);
  Var r = encode_context(g, xc, yc);

  std::vector<Matrix> heads;
  if (model.variant == Variant::cnp) {
    heads.push_back(decoder_head(g, {replicate_rows(r, m)}, xq).value());
    return heads;
  }

  GaussianNode prior = global_head(g, r, HeadKind::prior);
  Var attn;
  if (model.has_attention()) attn = attention_embed(g, xc, yc, xq);

  if (!noise) {
    Var zg = replicate_rows(prior.mean, m);
    if (model.variant == Variant::np) {
      heads.push_back(decoder_head(g, {zg}, xq).value());
    } else if (model.has_attention()) {
      heads.push_back(decoder_head(g, {attn, zg}, xq).value());
    } else {
      GaussianNode pl = local_prior(g, zg, xq);
      heads.push_back(decoder_head(g, {zg, pl.mean}, xq).value());
    }
    return heads;
  }

  const Matrix& eps_g = noise->global;
  if (eps_g.rows() < 1 || eps_g.cols() != model.dims.dim_lat) {
    throw ContractError("predict: global noise must have dim_lat columns and at least one row");
  }
  if (model.has_local_latent() && static_cast<Index>(noise->local.size()) != eps_g.rows()) {
    throw ContractError("predict: local noise needs one [S] block per global draw");
  }

  // Every sample below runs on its own tape, so memory holds one decoder
  // pass at a time rather than K*S of them.
  const GaussianParams prior_v = prior.values();
  const Matrix attn_v = model.has_attention() ? attn.value() : Matrix();
  for (Index i = 0; i < eps_g.rows(); ++i) {
    Pass p(model);
    Var xq_i = p.tape.constant(xq_m);
    GaussianNode pr = make_gaussian(p.tape.constant(prior_v.mean), p.tape.constant(prior_v.log_std));
    Var zg = replicate_rows(reparameterize(pr, eps_g.row(i)), m);
    if (!model.has_local_latent()) {
      heads.push_back(model.has_attention() ? decoder_head(p.g, {p.tape.constant(attn_v), zg}, xq_i).value()
                                            : decoder_head(p.g, {zg}, xq_i).value());
      continue;
    }
    const Matrix zg_v = zg.value();
    const GaussianParams pl_v = local_prior(p.g, zg, xq_i).values();
    for (const Matrix& e : noise->local[static_cast<std::size_t>(i)]) {
      if (e.rows() != m) throw ContractError("predict: local noise rows must equal the query count");
      Pass q(model);
      GaussianNode pl = make_gaussian(q.tape.constant(pl_v.mean), q.tape.constant(pl_v.log_std));
      heads.push_back(
          decoder_head(q.g, {q.tape.constant(zg_v), reparameterize(pl, e)}, q.tape.constant(xq_m)).value());
    }
  }
  return heads;
}

GaussianParams head_to_gaussian(const NpModel& model, const Matrix& head) {
  const Index dy = model.dims.dy;
  if (model.dims.likelihood == Likelihood::categorical) {
    throw ContractError("predict: categorical decoders have no Gaussian output, use predict_class_probs");
  }
  GaussianParams p{head.leftCols(dy), head.rightCols(dy)};
  if (model.dims.likelihood == Likelihood::mse) {
    p.log_std = Matrix::Constant(head.rows(), dy, raw_from_std(1.0));
  }
  return p;
}

}  // namespace

Matrix PredictiveMixture::mean() const {
  if (components.empty()) throw ContractError("empty mixture");
  Matrix acc = Matrix::Zero(components.front().mean.rows(), components.front().mean.cols());
  for (const auto& c : components) acc += c.mean;
  return acc / static_cast<double>(components.size());
}

Matrix PredictiveMixture::variance() const {
  const Matrix mu = mean();
  Matrix acc = Matrix::Zero(mu.rows(), mu.cols());
  for (const auto& c : components) {
    const Matrix sd = c.stddev();
    acc.array() += sd.array().square() + (c.mean - mu).array().square();
  }
  return acc / static_cast<double>(components.size());
}

Vector PredictiveMixture::log_density(const Matrix& y) const {
  if (components.empty()) throw ContractError("empty mixture");
  const Index n = y.rows();
  const Index c = size();
  Matrix lp(n, c);
  for (Index j = 0; j < c; ++j) lp.col(j) = -gaussian_nll_rows(y, components[static_cast<std::size_t>(j)]);
  Vector out(n);
  const double log_c = std::log(static_cast<double>(c));
  for (Index i = 0; i < n; ++i) {
    const double mx = lp.row(i).maxCoeff();
    if (!std::isfinite(mx)) {
      out(i) = -std::numeric_limits<double>::infinity();
      continue;
    }
    double acc = 0.0;
    for (Index j = 0; j < c; ++j) acc += std::exp(lp(i, j) - mx);
    out(i) = mx + std::log(acc) - log_c;
  }
  return out;
}

NoiseSet prediction_noise(const NpModel& model, Index num_query, int k, int s, Rng& rng) {
  if (k < 1 || s < 1) throw ContractError("predict: K and S must be >= 1");
  NoiseSet n;
  if (model.variant == Variant::cnp) return n;
  const Index dl = model.dims.dim_lat;
  if (!model.has_local_latent()) {
    n.global = standard_normal(static_cast<Index>(k) * s, dl, rng);
    return n;
  }
  n.global = standard_normal(k, dl, rng);
  n.local.resize(static_cast<std::size_t>(k));
  for (auto& block : n.local)
    for (int j = 0; j < s; ++j) block.push_back(standard_normal(num_query, dl, rng));
  return n;
}

PredictiveMixture predict(const NpModel& model, const Matrix& x_context, const Matrix& y_context,
                          const Matrix& x_query, const NoiseSet& noise) {
  PredictiveMixture mix;
  for (const Matrix& h : decoder_heads(model, x_context, y_context, x_query, &noise)) {
    mix.components.push_back(head_to_gaussian(model, h));
  }
  return mix;
}

PredictiveMixture predict(const NpModel& model, const Matrix& x_context, const Matrix& y_context,
                          const Matrix& x_query, int k, int s, Rng& rng) {
  return predict(model, x_context, y_context, x_query, prediction_noise(model, x_query.rows(), k, s, rng));
}

GaussianParams predict_deterministic(const NpModel& model, const Matrix& x_context,
                                     const Matrix& y_context, const Matrix& x_query) {
  return head_to_gaussian(model, decoder_heads(model, x_context, y_context, x_query, nullptr).front());
}

Matrix predict_class_probs(const NpModel& model, const Matrix& x_context, const Matrix& y_context,
                           const Matrix& x_query, int k, int s, Rng& rng) {
  if (model.dims.likelihood != Likelihood::categorical) {
    throw ContractError("predict_class_probs: model decoder is not categorical");
  }
  const NoiseSet noise = prediction_noise(model, x_query.rows(), k, s, rng);
  const auto heads = decoder_heads(model, x_context, y_context, x_query, &noise);
  Matrix acc = Matrix::Zero(x_query.rows(), model.dims.dy);
  for (const Matrix& h : heads) {
    for (Index i = 0; i < h.rows(); ++i) {
      const double mx = h.row(i).maxCoeff();
      const Eigen::RowVectorXd e = (h.row(i).array() - mx).exp().matrix();
      acc.row(i) += e / e.sum();
    }
  }
  return acc / static_cast<double>(heads.size());
}

}  // namespace nplab
