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

#ifndef CHANGESET_GEOMETRY_HPP
#define CHANGESET_GEOMETRY_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "changeset/errors.hpp"

/**
 * \file
 * \brief Partial order and staircase geometry on the positive quadrant.
 *
 * An upper layer is represented by the antichain of its generators: the
 * closed set of points dominating at least one generator. All functions are
 * pure; area computations sweep generators in ascending first coordinate so
 * the floating-point results are reproducible bit for bit.
 */

namespace changeset {

struct Point2 {
  double t1{0.0};
  double t2{0.0};

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Componentwise order: s <= t.
[[nodiscard]] constexpr bool leq(Point2 s, Point2 t) noexcept { return s.t1 <= t.t1 && s.t2 <= t.t2; }

/// The two-branch strict order: s_i < t_i where t_i > 0, and s_i = 0 where t_i = 0.
[[nodiscard]] constexpr bool strictly_below(Point2 s, Point2 t) noexcept {
  const bool first = t.t1 > 0.0 ? s.t1 < t.t1 : s.t1 == 0.0;
  const bool second = t.t2 > 0.0 ? s.t2 < t.t2 : s.t2 == 0.0;
  return first && second;
}

/// Closed upper layer generated by a finite antichain.
///
/// Generators are kept sorted by ascending first coordinate (hence strictly
/// descending second coordinate). An empty layer is the empty set.
class UpperLayer {
 public:
  UpperLayer() = default;

  [[nodiscard]] std::span<const Point2> generators() const noexcept { return generators_; }
  [[nodiscard]] bool empty() const noexcept { return generators_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return generators_.size(); }

  /// Staircase height: smallest second coordinate among generators with first
  /// coordinate <= x, or +inf when there is none.
  [[nodiscard]] double height_at(double x) const noexcept;

  friend bool operator==(const UpperLayer&, const UpperLayer&) = default;

 private:
  friend UpperLayer normalize(std::span<const Point2> points);
  std::vector<Point2> generators_;
};

/// Minimal antichain generating the same upper set as `points`. Idempotent.
[[nodiscard]] UpperLayer normalize(std::span<const Point2> points);

[[nodiscard]] bool contains(const UpperLayer& layer, Point2 t) noexcept;

/// Exact |A_t ∩ ξ| by a staircase sweep.
[[nodiscard]] double area_in_rect(const UpperLayer& layer, Point2 t) noexcept;

/// Exact |A_t \ ξ|, accumulated directly so it is nondecreasing in each
/// coordinate of t in floating point as well.
[[nodiscard]] double complement_area_in_rect(const UpperLayer& layer, Point2 t) noexcept;

/// Discretization of the window [0,r]^2 into n cells per side.
class GridSpec {
 public:
  GridSpec(double r, int n);

  [[nodiscard]] double r() const noexcept { return r_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double step() const noexcept { return r_ / n_; }
  [[nodiscard]] std::size_t nodes_per_side() const noexcept { return static_cast<std::size_t>(n_) + 1; }
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_per_side() * nodes_per_side(); }

  /// Coordinate of node index i along either axis; exact at i = n.
  [[nodiscard]] double coord(int i) const noexcept { return i == n_ ? r_ : i * r_ / n_; }
  [[nodiscard]] Point2 node(int i, int j) const noexcept { return {coord(i), coord(j)}; }
  /// Row-major index, j (second coordinate) outer.
  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nodes_per_side() + static_cast<std::size_t>(i);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double r_;
  int n_;
};

/// Boolean mask over grid nodes.
///
/// A lower-layer mask M stands for the closed region  ∪_{t in M} A_t, i.e. the
/// union of the cells whose upper-right corner is a member.
class LayerMask {
 public:
  explicit LayerMask(GridSpec grid, bool value = false);

  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] bool at(int i, int j) const noexcept { return member_[grid_.index(i, j)] != 0; }
  void set(int i, int j, bool value) noexcept { member_[grid_.index(i, j)] = value ? 1 : 0; }
  [[nodiscard]] std::size_t count() const noexcept;

  [[nodiscard]] bool is_lower_layer() const noexcept;
  [[nodiscard]] bool is_upper_layer() const noexcept;

  /// Highest member row in column i, or -1 for an empty column.
  [[nodiscard]] int column_top(int i) const noexcept;

  friend bool operator==(const LayerMask&, const LayerMask&) = default;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> member_;
};

/// Mask of the grid nodes lying in A_t.
[[nodiscard]] LayerMask rectangle_mask(GridSpec grid, Point2 t);

/// Lebesgue area of the region represented by a lower-layer mask.
[[nodiscard]] double region_area(const LayerMask& lower);

/// |B ∩ ξ| for the region B of a lower-layer mask.
///
/// \throws InvalidLayer if `lower` is not a lower layer.
[[nodiscard]] double layer_area_general(const UpperLayer& layer, const LayerMask& lower);

/// True if p lies in the closed region of a lower-layer mask.
[[nodiscard]] bool region_contains(const LayerMask& lower, Point2 p) noexcept;

void write_mask_csv(std::ostream& out, const LayerMask& mask);
void write_mask_pgm(std::ostream& out, const LayerMask& mask);
[[nodiscard]] LayerMask read_mask_csv(std::istream& in, double r);

}  // namespace changeset

#endif  // CHANGESET_GEOMETRY_HPP
