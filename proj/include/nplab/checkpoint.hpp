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

// Model persistence. A checkpoint is one JSON document:
//
//   {"header": {variant, dx, dy, dim_lat, dim_latx, dim_laty, encoder_hidden,
//               decoder_hidden, likelihood, format_version, config_hash},
//    "parameters": {name: {"shape": [rows, cols], "data": [row-major reals]}}}
//
// Keys are sorted and reals are written in shortest round-trip form, so
// save -> load -> save reproduces the file byte for byte.

#ifndef NPLAB_CHECKPOINT_HPP
#define NPLAB_CHECKPOINT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "nplab/model.hpp"

namespace nplab {

inline constexpr int kCheckpointFormat = 1;

/// 64-bit FNV-1a, used to fingerprint resolved configs.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

std::string checkpoint_to_string(const NpModel& model, const std::string& config_hash);

struct LoadedCheckpoint {
  NpModel model;
  std::string config_hash;
};

/// Throws ParseError on malformed documents and DimensionError when the
/// parameter shapes disagree with the header dims.
LoadedCheckpoint checkpoint_from_string(const std::string& text);

/// Writes atomically (temp file + rename). Throws IoError naming the path.
void save_checkpoint(const std::string& path, const NpModel& model, const std::string& config_hash);

/// When `expected_hash` is non-empty and differs from the stored one,
/// `warn` is called with a message; loading still succeeds.
LoadedCheckpoint load_checkpoint(const std::string& path, const std::string& expected_hash = {},
                                 const std::function<void(const std::string&)>& warn = {});

}  // namespace nplab

#endif  // NPLAB_CHECKPOINT_HPP
