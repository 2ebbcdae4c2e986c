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

#include "nplab/np_ops.hpp"

#include <cmath>

#include "nplab/errors.hpp"

namespace nplab {

Var encode_context(ModelGraph& g, Var x, Var y) {
  const ModelDims& d = g.model.dims;
  if (x.rows() != y.rows()) throw DimensionError("encode_context: x/y row counts differ");
  if (x.rows() == 0) return g.bind("null_context");
  Var r = mlp_forward(g.bind, layout::encoder(d), hconcat({x, y}));
  return colwise_mean(r);
}

GaussianNode global_head(ModelGraph& g, Var r, HeadKind which) {
  const ModelDims& d = g.model.dims;
  if (!g.model.has_global_latent()) throw ContractError("global_head: variant has no global latent");
  if (r.cols() != d.dim_lat) throw DimensionError("global_head: r width mismatch");
  const char* name = which == HeadKind::posterior ? "global_post" : "global_prior";
  return split_gaussian_head(mlp_forward(g.bind, layout::global_head(d, name), r));
}

Var attention_embed(ModelGraph& g, Var x_context, Var y_context, Var x_query) {
  const ModelDims& d = g.model.dims;
  if (!g.model.has_attention()) throw ContractError("attention_embed: variant has no attention path");
  if (x_context.rows() == 0) return replicate_rows(g.bind("null_values"), x_query.rows());
  Var values = mlp_forward(g.bind, layout::det_encoder(d), hconcat({x_context, y_context}));
  Var q = mlp_forward(g.bind, layout::attn_query(d), x_query);
  Var k = mlp_forward(g.bind, layout::attn_key(d), x_context);
  Var logits = (1.0 / std::sqrt(static_cast<double>(d.dim_latx))) * (q * transpose(k));
  return softmax_rows(logits) * values;
}

GaussianNode local_posterior(ModelGraph& g, Var z_global, Var x, Var y) {
  const ModelDims& d = g.model.dims;
  if (!g.model.has_local_latent()) throw ContractError("local_posterior: variant has no local latent");
  Var ex = mlp_forward(g.bind, layout::embed_x(d), x, Activation::relu, Activation::relu);
  Var ey = mlp_forward(g.bind, layout::embed_y(d), y, Activation::relu, Activation::relu);
  return split_gaussian_head(mlp_forward(g.bind, layout::local_posterior(d), hconcat({z_global, ex, ey})));
}

GaussianNode local_prior(ModelGraph& g, Var z_global, Var x) {
  const ModelDims& d = g.model.dims;
  if (!g.model.has_local_latent()) throw ContractError("local_prior: variant has no local latent");
  Var ex = mlp_forward(g.bind, layout::embed_x(d), x, Activation::relu, Activation::relu);
  return split_gaussian_head(mlp_forward(g.bind, layout::local_prior(d), hconcat({z_global, ex})));
}

Var decoder_head(ModelGraph& g, std::initializer_list<Var> latents, Var x) {
  Index width = 0;
  for (const Var& l : latents) width += l.cols();
  if (width != g.model.decoder_latent_width()) {
    throw ContractError("decode: latent width " + std::to_string(width) + " does not match " +
                        to_string(g.model.variant) + " (expects " +
                        std::to_string(g.model.decoder_latent_width()) + ")");
  }
  std::vector<Var> parts{x};
  parts.insert(parts.end(), latents.begin(), latents.end());
  return mlp_forward(g.bind, layout::decoder(g.model), hconcat(std::span<const Var>(parts)));
}

GaussianNode decode(ModelGraph& g, std::initializer_list<Var> latents, Var x) {
  const ModelDims& d = g.model.dims;
  if (d.likelihood == Likelihood::categorical) {
    throw ContractError("decode: categorical decoders emit logits, use decoder_head");
  }
  Var head = decoder_head(g, latents, x);
  GaussianNode out = split_gaussian_head(head);
  if (d.likelihood == Likelihood::mse) {
    const Index m = head.rows();
    out.log_std = g.tape().constant(Matrix::Constant(m, d.dy, raw_from_std(1.0)));
    out.stddev = g.tape().constant(Matrix::Ones(m, d.dy));
  }
  return out;
}

}  // namespace nplab
