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

#ifndef CHANGESET_DETECTOR_HPP
#define CHANGESET_DETECTOR_HPP

#include <optional>
#include <span>
#include <string>

#include "changeset/geometry.hpp"
#include "changeset/posterior.hpp"
#include "changeset/priors.hpp"

namespace changeset {

/// Grid stopping set. `member` is always a lower layer.
struct StoppingSet {
  LayerMask member;
  std::string source;
};

/// Grid estimate of ξ ∩ R. `member` is always an upper layer.
struct ChangeEstimate {
  LayerMask member;
};

/// Nodes t with V_s > 0 for every grid node s strictly below t (two-branch
/// order, so axis nodes are constrained only by axis nodes). Zero counts as
/// nonpositive.
[[nodiscard]] StoppingSet stopping_set_from_values(const GridSpec& grid, std::span<const double> values,
                                                   std::string source);
[[nodiscard]] StoppingSet stopping_set_from_field(const PosteriorField& field);

/// Node (i, j) is in the estimate unless the cell whose lower-left corner it
/// is belongs to the stopping region. Nodes on the top and right edges are
/// always included.
[[nodiscard]] ChangeEstimate estimate_changeset(const StoppingSet& rho);

/// V for a detector that never sees data: −c1 + (c0 + c1 + k1 λ_u) P(L_u = 0).
[[nodiscard]] double no_info_value(const PriorModel& prior, Point2 u, const DetectionParams& params);

/// Grid sweep of the no-information rule for any prior.
[[nodiscard]] StoppingSet no_info_baseline_sweep(const PriorModel& prior, const DetectionParams& params,
                                                 const GridSpec& grid);

/// The no-information stopping set. For the Poisson first line the boundary
/// is the hyperbola t1 t2 = (ln(c0 + c1 + k1 γ) − ln c1) / γ; other priors use
/// the grid sweep.
[[nodiscard]] StoppingSet no_info_baseline(const PriorModel& prior, const DetectionParams& params,
                                           const GridSpec& grid);

/// Threshold h of the first-line hyperbola u1 u2 < h.
[[nodiscard]] double first_line_baseline_level(const PriorModel& prior, const DetectionParams& params);

struct MonotoneVerdict {
  bool pass{true};
  /// First violating pair in node order: V at `from` ≤ 0, V at `to` > 0, from ≤ to.
  std::optional<Point2> from;
  std::optional<Point2> to;
  double value_from{0.0};
  double value_to{0.0};
};

/// V_s ≤ 0 ⇒ V_t ≤ 0 for every pair of grid nodes s ≤ t.
[[nodiscard]] MonotoneVerdict monotone_check(const GridSpec& grid, std::span<const double> values);
[[nodiscard]] MonotoneVerdict monotone_check(const PosteriorField& field);

}  // namespace changeset

#endif  // CHANGESET_DETECTOR_HPP
