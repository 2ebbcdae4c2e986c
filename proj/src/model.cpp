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

#include "nplab/model.hpp"

#include "nplab/errors.hpp"

namespace nplab {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::cnp: return "cnp";
    case Variant::np: return "np";
    case Variant::attn_np: return "attnnp";
    case Variant::dsvnp: return "dsvnp";
  }
  return "?";
}

std::string to_string(Likelihood l) {
  switch (l) {
    case Likelihood::gaussian: return "gaussian";
    case Likelihood::mse: return "mse";
    case Likelihood::categorical: return "categorical";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "cnp") return Variant::cnp;
  if (s == "np") return Variant::np;
  if (s == "attnnp" || s == "attn_np" || s == "anp") return Variant::attn_np;
  if (s == "dsvnp") return Variant::dsvnp;
  throw ConfigError("unknown model variant '" + std::string(s) + "' (expected cnp|np|attnnp|dsvnp)");
}

Likelihood parse_likelihood(std::string_view s) {
  if (s == "gaussian" || s == "nll") return Likelihood::gaussian;
  if (s == "mse") return Likelihood::mse;
  if (s == "categorical") return Likelihood::categorical;
  throw ConfigError("unknown likelihood '" + std::string(s) + "'");
}

Index NpModel::decoder_latent_width() const {
  return (has_attention() || has_local_latent()) ? 2 * dims.dim_lat : dims.dim_lat;
}

Index NpModel::decoder_output_width() const {
  return dims.likelihood == Likelihood::categorical ? dims.dy : 2 * dims.dy;
}

namespace layout {

namespace {
MlpSpec stack(std::string name, Index in, const std::vector<Index>& hidden, Index out) {
  MlpSpec s{std::move(name), {in}};
  s.widths.insert(s.widths.end(), hidden.begin(), hidden.end());
  s.widths.push_back(out);
  return s;
}
}  // namespace

MlpSpec encoder(const ModelDims& d) { return stack("encoder", d.dx + d.dy, d.encoder_hidden, d.dim_lat); }
MlpSpec det_encoder(const ModelDims& d) {
  return stack("det_encoder", d.dx + d.dy, d.encoder_hidden, d.dim_lat);
}
MlpSpec global_head(const ModelDims& d, std::string name) {
  return MlpSpec{std::move(name), {d.dim_lat, 2 * d.dim_lat}};
}
MlpSpec attn_query(const ModelDims& d) { return MlpSpec{"attn_query", {d.dx, d.dim_latx}}; }
MlpSpec attn_key(const ModelDims& d) { return MlpSpec{"attn_key", {d.dx, d.dim_latx}}; }
MlpSpec embed_x(const ModelDims& d) { return MlpSpec{"embed_x", {d.dx, d.dim_latx}}; }
MlpSpec embed_y(const ModelDims& d) { return MlpSpec{"embed_y", {d.dy, d.dim_laty}}; }
MlpSpec local_posterior(const ModelDims& d) {
  return MlpSpec{"local_post", {d.dim_lat + d.dim_latx + d.dim_laty, d.dim_lat, 2 * d.dim_lat}};
}
MlpSpec local_prior(const ModelDims& d) {
  return MlpSpec{"local_prior", {d.dim_lat + d.dim_latx, d.dim_lat, 2 * d.dim_lat}};
}
MlpSpec decoder(const NpModel& m) {
  return stack("decoder", m.dims.dx + m.decoder_latent_width(), m.dims.decoder_hidden,
               m.decoder_output_width());
}

}  // namespace layout

std::vector<MlpSpec> model_layers(Variant v, const ModelDims& d) {
  NpModel shell{v, d, {}};
  std::vector<MlpSpec> out{layout::encoder(d)};
  if (shell.has_global_latent()) {
    out.push_back(layout::global_head(d, "global_post"));
    out.push_back(layout::global_head(d, "global_prior"));
  }
  if (shell.has_attention()) {
    out.push_back(layout::det_encoder(d));
    out.push_back(layout::attn_query(d));
    out.push_back(layout::attn_key(d));
  }
  if (shell.has_local_latent()) {
    out.push_back(layout::embed_x(d));
    out.push_back(layout::embed_y(d));
    out.push_back(layout::local_posterior(d));
    out.push_back(layout::local_prior(d));
  }
  out.push_back(layout::decoder(shell));
  return out;
}

NpModel make_model(Variant v, const ModelDims& dims, std::uint64_t seed) {
  if (dims.dx < 1 || dims.dy < 1 || dims.dim_lat < 1 || dims.dim_latx < 1 || dims.dim_laty < 1) {
    throw ContractError("make_model: all widths must be positive");
  }
  NpModel m{v, dims, {}};
  Rng rng = make_rng(seed, 0x1a2b);
  for (const MlpSpec& spec : model_layers(v, dims)) init_mlp(spec, m.params, rng);
  // learned stand-ins for an empty context at prediction time
  m.params["null_context"] = Matrix::Zero(1, dims.dim_lat);
  if (m.has_attention()) m.params["null_values"] = Matrix::Zero(1, dims.dim_lat);
  return m;
}

}  // namespace nplab
