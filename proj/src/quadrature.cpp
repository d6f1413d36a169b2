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

#include "changeset/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <memory>

#include "changeset/errors.hpp"

namespace changeset {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw InvalidArgument("quadrature order must be positive");
  const std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), &gsl_integration_glfixed_table_free);
  if (!table) throw InvalidArgument("cannot build Gauss-Legendre table");
  nodes_.resize(static_cast<std::size_t>(order));
  weights_.resize(static_cast<std::size_t>(order));
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    gsl_integration_glfixed_point(0.0, 1.0, k, &nodes_[k], &weights_[k], table.get());
  }
}

}  // namespace changeset
