// Copyright 2026 The changeset Authors
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

#ifndef CHANGESET_ERRORS_HPP
#define CHANGESET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace changeset {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the command line front end.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
  [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

struct InvalidLayer : Error {
  explicit InvalidLayer(const std::string& what) : Error("invalid-layer", what) {}
};

struct DegenerateHazard : Error {
  explicit DegenerateHazard(const std::string& what) : Error("degenerate-hazard", what) {}
};

struct QuadratureNonConvergence : Error {
  explicit QuadratureNonConvergence(const std::string& what) : Error("quadrature-nonconvergence", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

}  // namespace changeset

#endif  // CHANGESET_ERRORS_HPP
