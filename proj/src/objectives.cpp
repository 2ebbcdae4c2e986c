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

#include "nplab/objectives.hpp"

#include <cmath>
#include <random>

#include "nplab/errors.hpp"

namespace nplab {

namespace {

Matrix standard_normal(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  // row-major draw order: row i is consumed before row i + 1
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

Var zero(ModelGraph& g) { return g.tape().constant(Matrix::Zero(1, 1)); }

void check_batch(const ContextTargetBatch& b, const ModelDims& d) {
  if (b.x_context.rows() != b.y_context.rows() || b.x_target.rows() != b.y_target.rows()) {
    throw DimensionError("batch: x/y row counts differ");
  }
  if ((b.x_context.rows() > 0 && b.x_context.cols() != d.dx) || b.x_target.cols() != d.dx) {
    throw DimensionError("batch: x width does not match model dx=" + std::to_string(d.dx));
  }
  if ((b.y_context.rows() > 0 && b.y_context.cols() != d.dy) || b.y_target.cols() != d.dy) {
    throw DimensionError("batch: y width does not match model dy=" + std::to_string(d.dy));
  }
  if (b.num_context() < 1) throw ContractError("training loss needs at least one context point");
  if (b.num_target() < 1) throw ContractError("training loss needs at least one target point");
}

Var decode_and_score(ModelGraph& g, std::initializer_list<Var> latents, Var x, Var y) {
  if (g.model.dims.likelihood == Likelihood::categorical) {
    Var logits = decoder_head(g, latents, x);
    return reconstruction_loss(g, logits, nullptr, y);
  }
  GaussianNode dist = decode(g, latents, x);
  return reconstruction_loss(g, dist.mean, &dist, y);
}

GaussianNode global_latents(ModelGraph& g, const ContextTargetBatch& b, Var xc, Var yc, Var xt,
                            Var yt, GaussianNode* prior) {
  Var r_target = encode_context(g, xt, yt);
  Var r_context = encode_context(g, xc, yc);
  *prior = global_head(g, r_context, HeadKind::prior);
  (void)b;
  return global_head(g, r_target, HeadKind::posterior);
}

}  // namespace

NoiseSet draw_noise(const NpModel& model, Index num_target, int k, int s, Rng& rng) {
  if (k < 1 || s < 1) throw ContractError("draw_noise: K and S must be >= 1");
  NoiseSet n;
  const Index d = model.dims.dim_lat;
  n.global = standard_normal(k, d, rng);
  if (model.has_local_latent()) {
    n.local.resize(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < s; ++j) n.local[i].push_back(standard_normal(num_target, d, rng));
  }
  return n;
}

NoiseSet zero_noise(const NpModel& model, Index num_target, int k, int s) {
  if (k < 1 || s < 1) throw ContractError("zero_noise: K and S must be >= 1");
  NoiseSet n;
  const Index d = model.dims.dim_lat;
  n.global = Matrix::Zero(k, d);
  if (model.has_local_latent()) {
    n.local.assign(k, std::vector<Matrix>(s, Matrix::Zero(num_target, d)));
  }
  return n;
}

Var reconstruction_loss(ModelGraph& g, Var head_or_mean, const GaussianNode* dist, Var y) {
  switch (g.model.dims.likelihood) {
    case Likelihood::gaussian:
      return gaussian_nll(y, *dist, Reduction::mean_rows);
    case Likelihood::mse:
      return mean_squared_error(y, head_or_mean, Reduction::mean_rows);
    case Likelihood::categorical: {
      Var logp = log_softmax_rows(head_or_mean);
      return (-1.0 / static_cast<double>(y.rows())) * sum(cwise_product(y, logp));
    }
  }
  throw ContractError("unknown likelihood");
}

ElboTerms loss_cnp(ModelGraph& g, const ContextTargetBatch& b) {
  if (g.model.variant != Variant::cnp) throw ContractError("loss_cnp: model is " + to_string(g.model.variant));
  check_batch(b, g.model.dims);
  Tape& t = g.tape();
  Var xc = t.constant(b.x_context), yc = t.constant(b.y_context);
  Var xt = t.constant(b.x_target), yt = t.constant(b.y_target);
  Var r = replicate_rows(encode_context(g, xc, yc), xt.rows());
  Var rec = decode_and_score(g, {r}, xt, yt);
  return {rec, zero(g), zero(g), rec};
}

ElboTerms elbo_np(ModelGraph& g, const ContextTargetBatch& b, const NoiseSet& noise, const KlWeights& w) {
  if (g.model.variant != Variant::np && g.model.variant != Variant::attn_np) {
    throw ContractError("elbo_np: model is " + to_string(g.model.variant));
  }
  check_batch(b, g.model.dims);
  if (noise.k() < 1 || noise.global.cols() != g.model.dims.dim_lat) {
    throw ContractError("elbo_np: global noise must be K x dim_lat with K >= 1");
  }
  Tape& t = g.tape();
  Var xc = t.constant(b.x_context), yc = t.constant(b.y_context);
  Var xt = t.constant(b.x_target), yt = t.constant(b.y_target);
  const Index m = xt.rows();

  GaussianNode prior;
  GaussianNode post = global_latents(g, b, xc, yc, xt, yt, &prior);
  Var kl_g = (1.0 / static_cast<double>(m)) * kl_diag_gaussian(post, prior);

  Var attn;
  if (g.model.has_attention()) attn = attention_embed(g, xc, yc, xt);

  Var rec;
  for (int k = 0; k < noise.k(); ++k) {
    Var zg = replicate_rows(reparameterize(post, noise.global.row(k)), m);
    Var term = g.model.has_attention() ? decode_and_score(g, {attn, zg}, xt, yt)
                                       : decode_and_score(g, {zg}, xt, yt);
    rec = rec.valid() ? rec + term : term;
  }
  if (noise.k() > 1) rec = (1.0 / noise.k()) * rec;
  return {rec, zero(g), kl_g, rec + w.global * kl_g};
}

ElboTerms elbo_dsvnp(ModelGraph& g, const ContextTargetBatch& b, const NoiseSet& noise,
                     const KlWeights& w) {
  if (g.model.variant != Variant::dsvnp) throw ContractError("elbo_dsvnp: model is " + to_string(g.model.variant));
  check_batch(b, g.model.dims);
  const int kk = noise.k(), ss = noise.s();
  if (kk < 1 || ss < 1 || static_cast<int>(noise.local.size()) != kk) {
    throw ContractError("elbo_dsvnp: K and S must be >= 1 with local noise [K][S]");
  }
  Tape& t = g.tape();
  Var xc = t.constant(b.x_context), yc = t.constant(b.y_context);
  Var xt = t.constant(b.x_target), yt = t.constant(b.y_target);
  const Index m = xt.rows();

  GaussianNode prior;
  GaussianNode post = global_latents(g, b, xc, yc, xt, yt, &prior);
  Var kl_g = (1.0 / static_cast<double>(m)) * kl_diag_gaussian(post, prior);

  Var rec, kl_l;
  for (int k = 0; k < kk; ++k) {
    Var zg = replicate_rows(reparameterize(post, noise.global.row(k)), m);
    GaussianNode q_local = local_posterior(g, zg, xt, yt);
    GaussianNode p_local = local_prior(g, zg, xt);
    Var kl_k = kl_diag_gaussian(q_local, p_local, Reduction::mean_rows);
    kl_l = kl_l.valid() ? kl_l + kl_k : kl_k;
    Var rec_k;
    for (int s = 0; s < ss; ++s) {
      if (noise.local[k][s].rows() != m) throw ContractError("elbo_dsvnp: local noise rows != targets");
      Var zl = reparameterize(q_local, noise.local[k][s]);
      Var term = decode_and_score(g, {zg, zl}, xt, yt);
      rec_k = rec_k.valid() ? rec_k + term : term;
    }
    if (ss > 1) rec_k = (1.0 / ss) * rec_k;
    rec = rec.valid() ? rec + rec_k : rec_k;
  }
  if (kk > 1) {
    rec = (1.0 / kk) * rec;
    kl_l = (1.0 / kk) * kl_l;
  }
  return {rec, kl_l, kl_g, rec + w.local * kl_l + w.global * kl_g};
}

ElboTerms model_loss(ModelGraph& g, const ContextTargetBatch& b, const NoiseSet& noise, const KlWeights& w) {
  ElboTerms terms;
  switch (g.model.variant) {
    case Variant::cnp: terms = loss_cnp(g, b); break;
    case Variant::np:
    case Variant::attn_np: terms = elbo_np(g, b, noise, w); break;
    case Variant::dsvnp: terms = elbo_dsvnp(g, b, noise, w); break;
  }
  if (!std::isfinite(terms.loss.scalar())) throw NumericError("loss is not finite");
  return terms;
}

double evaluate_loss(const NpModel& model, const ContextTargetBatch& batch, const NoiseSet& noise,
                     const KlWeights& w) {
  Tape tape;
  ModelGraph g(model, tape, false);
  return model_loss(g, batch, noise, w).loss.scalar();
}

LossAndGradients loss_and_gradients(const NpModel& model, const std::vector<ContextTargetBatch>& tasks,
                                    const std::vector<NoiseSet>& noise, const KlWeights& w) {
  if (tasks.empty() || tasks.size() != noise.size()) {
    throw ContractError("loss_and_gradients: need one noise set per task");
  }
  Tape tape;
  ModelGraph g(model, tape);
  Var total;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Var l = model_loss(g, tasks[i], noise[i], w).loss;
    total = total.valid() ? total + l : l;
  }
  if (tasks.size() > 1) total = (1.0 / static_cast<double>(tasks.size())) * total;
  tape.backward(total);
  return {total.scalar(), g.bind.gradients()};
}

}  // namespace nplab
