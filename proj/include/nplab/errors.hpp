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

#ifndef NPLAB_ERRORS_HPP
#define NPLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nplab {

/// Shapes of two operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or Inf appeared where a finite value is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the call itself was violated (sizes, counts, variant).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input file; the message carries the row number when known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorisation of a kernel matrix failed.
class SingularKernelError : public std::runtime_error {
 public:
  SingularKernelError(const std::string& what, double jitter)
      : std::runtime_error(what + " (jitter " + std::to_string(jitter) + ")"),
        jitter_(jitter) {}
  double jitter() const { return jitter_; }

 private:
  double jitter_;
};

/// Bad experiment configuration (unknown key, wrong type, bad variant name).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nplab

#endif  // NPLAB_ERRORS_HPP
