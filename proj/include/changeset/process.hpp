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

#ifndef CHANGESET_PROCESS_HPP
#define CHANGESET_PROCESS_HPP

#include <iosfwd>
#include <utility>
#include <vector>

#include "changeset/geometry.hpp"
#include "changeset/priors.hpp"
#include "changeset/rng.hpp"

namespace changeset {

/// Observed events inside the window [0,r]^2, in no particular order.
struct PointPattern {
  std::vector<Point2> points;
  double r{1.0};

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Points in the half-open rectangle (lo, hi]; a zero lower coordinate also
/// admits points on that axis.
[[nodiscard]] std::size_t count_in_rect(const PointPattern& pattern, Point2 lo, Point2 hi) noexcept;

/// N_t = N(A_t).
[[nodiscard]] std::size_t count_below(const PointPattern& pattern, Point2 t) noexcept;

/// N(A_t ∩ ξ) with ξ closed.
[[nodiscard]] std::size_t count_below_in_layer(const PointPattern& pattern, const UpperLayer& xi, Point2 t) noexcept;

/// N given ξ by superposition: Poisson(μ0) on the window plus Poisson(μ1 − μ0)
/// thinned to ξ. The base layer is skipped when μ0 = 0.
[[nodiscard]] PointPattern sample_observation(const UpperLayer& xi, const DetectionParams& params, RandomStream& rng);

/// (ξ, N) from the model; ξ is drawn first from the same stream.
[[nodiscard]] std::pair<UpperLayer, PointPattern> sample_pair(const PriorModel& prior, const DetectionParams& params,
                                                              RandomStream& rng);

/// CSV "x,y" rows; a non-numeric first line is taken as a header.
void write_points_csv(std::ostream& out, const std::vector<Point2>& points);
[[nodiscard]] std::vector<Point2> read_points_csv(std::istream& in);

}  // namespace changeset

#endif  // CHANGESET_PROCESS_HPP
