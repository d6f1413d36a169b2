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

#ifndef CHANGESET_QUADRATURE_HPP
#define CHANGESET_QUADRATURE_HPP

#include <span>
#include <vector>

namespace changeset {

/// Gauss–Legendre rule of a given order, stored on the unit interval.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  [[nodiscard]] int order() const noexcept { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

  /// ∫_a^b f with this rule.
  template <class F>
  [[nodiscard]] double integrate(double a, double b, F&& f) const {
    const double width = b - a;
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) sum += weights_[k] * f(a + width * nodes_[k]);
    return sum * width;
  }

  /// Tensor-product rule over [a1,b1] x [a2,b2].
  template <class F>
  [[nodiscard]] double integrate(double a1, double b1, double a2, double b2, F&& f) const {
    return integrate(a1, b1, [&](double x) { return integrate(a2, b2, [&](double y) { return f(x, y); }); });
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace changeset

#endif  // CHANGESET_QUADRATURE_HPP
