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

#ifndef NPLAB_MODEL_HPP
#define NPLAB_MODEL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nplab/layers.hpp"
#include "nplab/parameters.hpp"

namespace nplab {

/// The four members of the family, in order of structural richness:
///   cnp     deterministic context embedding, no latent, no KL
///   np      one global Gaussian latent z_G with amortised prior
///   attn_np z_G plus a deterministic attention path per target
///   dsvnp   z_G plus a stochastic local latent z_* per target
enum class Variant { cnp, np, attn_np, dsvnp };

/// How the decoder output is scored.
enum class Likelihood { gaussian, mse, categorical };

std::string to_string(Variant v);
std::string to_string(Likelihood l);
/// Accepts "cnp", "np", "attnnp"/"attn_np", "dsvnp"; throws ConfigError.
Variant parse_variant(std::string_view s);
Likelihood parse_likelihood(std::string_view s);

struct ModelDims {
  Index dx = 1;
  Index dy = 1;
  Index dim_lat = 128;
  Index dim_latx = 32;
  Index dim_laty = 32;
  std::vector<Index> encoder_hidden{32, 32};
  std::vector<Index> decoder_hidden{128, 128};
  Likelihood likelihood = Likelihood::gaussian;
};

struct NpModel {
  Variant variant = Variant::np;
  ModelDims dims;
  ParameterSet params;

  bool has_global_latent() const { return variant != Variant::cnp; }
  bool has_attention() const { return variant == Variant::attn_np; }
  bool has_local_latent() const { return variant == Variant::dsvnp; }

  /// Width of the latent part of the decoder input: dim_lat, or 2 dim_lat
  /// when a local path (attention or z_*) is concatenated.
  Index decoder_latent_width() const;
  /// 2 dy for Gaussian/MSE decoders (mean and raw sigma), dy logits otherwise.
  Index decoder_output_width() const;
};

/// Parameter-set layouts. Names are stable: they key checkpoints.
namespace layout {
MlpSpec encoder(const ModelDims& d);           // h_theta: [x, y] -> r_i
MlpSpec det_encoder(const ModelDims& d);       // attention values s_i
MlpSpec global_head(const ModelDims& d, std::string name);  // r -> [mu, raw]
MlpSpec attn_query(const ModelDims& d);
MlpSpec attn_key(const ModelDims& d);
MlpSpec embed_x(const ModelDims& d);
MlpSpec embed_y(const ModelDims& d);
MlpSpec local_posterior(const ModelDims& d);   // [z_G, ex, ey] -> [mu, raw]
MlpSpec local_prior(const ModelDims& d);       // [z_G, ex] -> [mu, raw]
MlpSpec decoder(const NpModel& m);
}  // namespace layout

/// Every MLP the variant owns (and nothing else).
std::vector<MlpSpec> model_layers(Variant v, const ModelDims& d);

/// Builds a freshly initialised model. Deterministic in `seed`.
NpModel make_model(Variant v, const ModelDims& dims, std::uint64_t seed);

}  // namespace nplab

#endif  // NPLAB_MODEL_HPP
