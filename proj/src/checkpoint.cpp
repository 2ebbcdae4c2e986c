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

#include "nplab/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nplab/errors.hpp"

namespace nplab {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string checkpoint_to_string(const NpModel& model, const std::string& config_hash) {
  const ModelDims& d = model.dims;
  json header = {{"variant", to_string(model.variant)},
                 {"dx", d.dx},
                 {"dy", d.dy},
                 {"dim_lat", d.dim_lat},
                 {"dim_latx", d.dim_latx},
                 {"dim_laty", d.dim_laty},
                 {"encoder_hidden", d.encoder_hidden},
                 {"decoder_hidden", d.decoder_hidden},
                 {"likelihood", to_string(d.likelihood)},
                 {"format_version", kCheckpointFormat},
                 {"config_hash", config_hash}};
  json params = json::object();
  for (const auto& [name, m] : model.params) {
    if (!all_finite(m)) throw NumericError("checkpoint: parameter '" + name + "' is not finite");
    json data = json::array();
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    params[name] = {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
  }
  return json{{"header", header}, {"parameters", params}}.dump() + "\n";
}

LoadedCheckpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  LoadedCheckpoint out;
  ModelDims d;
  Variant v;
  try {
    const json& h = doc.at("header");
    const int version = h.at("format_version").get<int>();
    if (version != kCheckpointFormat) {
      throw ParseError("checkpoint: unsupported format_version " + std::to_string(version));
    }
    v = parse_variant(h.at("variant").get<std::string>());
    d.dx = h.at("dx").get<Index>();
    d.dy = h.at("dy").get<Index>();
    d.dim_lat = h.at("dim_lat").get<Index>();
    d.dim_latx = h.at("dim_latx").get<Index>();
    d.dim_laty = h.at("dim_laty").get<Index>();
    d.encoder_hidden = h.at("encoder_hidden").get<std::vector<Index>>();
    d.decoder_hidden = h.at("decoder_hidden").get<std::vector<Index>>();
    d.likelihood = parse_likelihood(h.at("likelihood").get<std::string>());
    out.config_hash = h.at("config_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }

  // the layout a model with these dims must have
  out.model = make_model(v, d, 0);
  const std::string dims_str = "dx=" + std::to_string(d.dx) + " dy=" + std::to_string(d.dy) +
                               " dim_lat=" + std::to_string(d.dim_lat);
  try {
    const json& ps = doc.at("parameters");
    if (ps.size() != out.model.params.size()) {
      throw DimensionError("checkpoint: " + std::to_string(ps.size()) + " parameter arrays, a " +
                           to_string(v) + " with " + dims_str + " has " +
                           std::to_string(out.model.params.size()));
    }
    for (auto& [name, m] : out.model.params) {
      if (!ps.contains(name)) throw DimensionError("checkpoint: missing parameter '" + name + "'");
      const json& p = ps.at(name);
      const auto shape = p.at("shape").get<std::vector<Index>>();
      const auto& data = p.at("data");
      if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
          static_cast<Index>(data.size()) != m.size()) {
        throw DimensionError("checkpoint: parameter '" + name + "' has the wrong shape for " + dims_str);
      }
      Index k = 0;
      for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = data.at(static_cast<std::size_t>(k++)).get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint parameters: ") + e.what());
  }
  return out;
}

void save_checkpoint(const std::string& path, const NpModel& model, const std::string& config_hash) {
  const std::string text = checkpoint_to_string(model, config_hash);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write checkpoint '" + path + "'");
    f << text;
    if (!f) throw IoError("error writing checkpoint '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot write checkpoint '" + path + "': " + ec.message());
}

LoadedCheckpoint load_checkpoint(const std::string& path, const std::string& expected_hash,
                                 const std::function<void(const std::string&)>& warn) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  LoadedCheckpoint c = checkpoint_from_string(ss.str());
  if (!expected_hash.empty() && c.config_hash != expected_hash && warn) {
    warn("checkpoint '" + path + "' was written under config " + c.config_hash + ", current config is " +
         expected_hash);
  }
  return c;
}

}  // namespace nplab
