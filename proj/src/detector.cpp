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

#include "changeset/detector.hpp"

#include <cmath>
#include <vector>

#include "changeset/errors.hpp"

namespace changeset {

namespace {

// Membership from a node predicate `ok`: prefix(i, j) is the AND of ok over
// [0..i] x [0..j], and node (i, j) looks at the prefix strictly below it.
template <class Ok>
LayerMask strict_prefix_mask(const GridSpec& grid, Ok&& ok) {
  const int n = grid.n();
  std::vector<std::uint8_t> prefix(grid.node_count(), 0);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      bool v = ok(i, j);
      if (i > 0) v = v && prefix[grid.index(i - 1, j)];
      if (j > 0) v = v && prefix[grid.index(i, j - 1)];
      prefix[grid.index(i, j)] = v ? 1 : 0;
    }
  }
  LayerMask mask(grid);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      bool member;
      if (i > 0 && j > 0) {
        member = prefix[grid.index(i - 1, j - 1)] != 0;
      } else if (j > 0) {
        member = prefix[grid.index(0, j - 1)] != 0;
      } else if (i > 0) {
        member = prefix[grid.index(i - 1, 0)] != 0;
      } else {
        member = ok(0, 0);
      }
      mask.set(i, j, member);
    }
  }
  return mask;
}

}  // namespace

StoppingSet stopping_set_from_values(const GridSpec& grid, std::span<const double> values, std::string source) {
  if (values.size() != grid.node_count()) throw InvalidArgument("field size does not match the grid");
  for (const double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
  }
  LayerMask mask = strict_prefix_mask(grid, [&](int i, int j) { return values[grid.index(i, j)] > 0.0; });
  return {std::move(mask), std::move(source)};
}

StoppingSet stopping_set_from_field(const PosteriorField& field) {
  return stopping_set_from_values(field.grid, field.values, "optimal-rho-hat(" + field.prior_id + ")");
}

ChangeEstimate estimate_changeset(const StoppingSet& rho) {
  const GridSpec& grid = rho.member.grid();
  const int n = grid.n();
  LayerMask mask(grid);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mask.set(i, j, i == n || j == n || !rho.member.at(i + 1, j + 1));
    }
  }
  return {std::move(mask)};
}

double no_info_value(const PriorModel& prior, Point2 u, const DetectionParams& params) {
  const double p = prob_no_jump(prior, u);
  if (p <= 0.0) return -params.c1;
  double hazard = 0.0;
  if (params.k1 != 0.0) {
    try {
      hazard = weak_hazard(prior, u);
    } catch (const DegenerateHazard&) {
      return -params.c1;
    }
  }
  return -params.c1 + (params.c0 + params.c1 + params.k1 * hazard) * p;
}

StoppingSet no_info_baseline_sweep(const PriorModel& prior, const DetectionParams& params, const GridSpec& grid) {
  LayerMask mask = strict_prefix_mask(
      grid, [&](int i, int j) { return no_info_value(prior, grid.node(i, j), params) > 0.0; });
  return {std::move(mask), "no-info-baseline(" + prior.describe() + ")"};
}

double first_line_baseline_level(const PriorModel& prior, const DetectionParams& params) {
  if (prior.kind() != PriorKind::first_line_poisson) throw InvalidArgument("hyperbola level needs the first-line prior");
  const double g = prior.gamma();
  return (std::log(params.c0 + params.c1 + params.k1 * g) - std::log(params.c1)) / g;
}

StoppingSet no_info_baseline(const PriorModel& prior, const DetectionParams& params, const GridSpec& grid) {
  if (prior.kind() != PriorKind::first_line_poisson) return no_info_baseline_sweep(prior, params, grid);
  // u1 u2 < h for every grid node u strictly below t; the largest such
  // product is at the node diagonally below, or 0 on the axes.
  const double h = first_line_baseline_level(prior, params);
  LayerMask mask(grid);
  for (int j = 0; j <= grid.n(); ++j) {
    for (int i = 0; i <= grid.n(); ++i) {
      const double worst = (i > 0 && j > 0) ? grid.coord(i - 1) * grid.coord(j - 1) : 0.0;
      mask.set(i, j, worst < h);
    }
  }
  return {std::move(mask), "no-info-baseline(" + prior.describe() + ")"};
}

MonotoneVerdict monotone_check(const GridSpec& grid, std::span<const double> values) {
  if (values.size() != grid.node_count()) throw InvalidArgument("field size does not match the grid");
  // witness(i, j): some node ≤ (i, j) with V ≤ 0, or -1.
  const int n = grid.n();
  std::vector<long> witness(grid.node_count(), -1);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const std::size_t k = grid.index(i, j);
      long w = values[k] <= 0.0 ? static_cast<long>(k) : -1;
      if (w < 0 && i > 0) w = witness[grid.index(i - 1, j)];
      if (w < 0 && j > 0) w = witness[grid.index(i, j - 1)];
      witness[k] = w;
      if (w >= 0 && values[k] > 0.0) {
        const auto s = static_cast<std::size_t>(w);
        const int si = static_cast<int>(s % grid.nodes_per_side());
        const int sj = static_cast<int>(s / grid.nodes_per_side());
        return {false, grid.node(si, sj), grid.node(i, j), values[s], values[k]};
      }
    }
  }
  return {};
}

MonotoneVerdict monotone_check(const PosteriorField& field) { return monotone_check(field.grid, field.values); }

}  // namespace changeset
