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

#include "changeset/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace changeset {

double UpperLayer::height_at(double x) const noexcept {
  const auto it = std::upper_bound(generators_.begin(), generators_.end(), x,
                                   [](double value, const Point2& g) { return value < g.t1; });
  if (it == generators_.begin()) {
    return std::numeric_limits<double>::infinity();
  }
  return std::prev(it)->t2;
}

UpperLayer normalize(std::span<const Point2> points) {
  std::vector<Point2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Point2& a, const Point2& b) { return a.t1 < b.t1 || (a.t1 == b.t1 && a.t2 < b.t2); });

  UpperLayer layer;
  double lowest = std::numeric_limits<double>::infinity();
  for (const Point2& p : sorted) {
    if (p.t2 < lowest) {
      layer.generators_.push_back(p);
      lowest = p.t2;
    }
  }
  return layer;
}

bool contains(const UpperLayer& layer, Point2 t) noexcept { return layer.height_at(t.t1) <= t.t2; }

double area_in_rect(const UpperLayer& layer, Point2 t) noexcept {
  const auto gens = layer.generators();
  double area = 0.0;
  for (std::size_t k = 0; k < gens.size() && gens[k].t1 < t.t1; ++k) {
    const double right = k + 1 < gens.size() ? std::min(gens[k + 1].t1, t.t1) : t.t1;
    const double height = t.t2 - gens[k].t2;
    if (height > 0.0) {
      area += (right - gens[k].t1) * height;
    }
  }
  return area;
}

double complement_area_in_rect(const UpperLayer& layer, Point2 t) noexcept {
  const auto gens = layer.generators();
  if (gens.empty() || gens.front().t1 >= t.t1) {
    return t.t1 * t.t2;
  }
  double area = gens.front().t1 * t.t2;
  for (std::size_t k = 0; k < gens.size() && gens[k].t1 < t.t1; ++k) {
    const double right = k + 1 < gens.size() ? std::min(gens[k + 1].t1, t.t1) : t.t1;
    area += (right - gens[k].t1) * std::min(t.t2, gens[k].t2);
  }
  return area;
}

GridSpec::GridSpec(double r, int n) : r_(r), n_(n) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("grid side r must be positive and finite");
  }
  if (n < 1) {
    throw InvalidArgument("grid must have at least one cell per side");
  }
}

LayerMask::LayerMask(GridSpec grid, bool value) : grid_(grid), member_(grid.node_count(), value ? 1 : 0) {}

std::size_t LayerMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), std::uint8_t{1}));
}

bool LayerMask::is_lower_layer() const noexcept {
  const int n = grid_.n();
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      if (at(i, j) && ((i > 0 && !at(i - 1, j)) || (j > 0 && !at(i, j - 1)))) {
        return false;
      }
    }
  }
  return true;
}

bool LayerMask::is_upper_layer() const noexcept {
  const int n = grid_.n();
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      if (at(i, j) && ((i < n && !at(i + 1, j)) || (j < n && !at(i, j + 1)))) {
        return false;
      }
    }
  }
  return true;
}

int LayerMask::column_top(int i) const noexcept {
  for (int j = grid_.n(); j >= 0; --j) {
    if (at(i, j)) {
      return j;
    }
  }
  return -1;
}

LayerMask rectangle_mask(GridSpec grid, Point2 t) {
  LayerMask mask(grid);
  for (int j = 0; j <= grid.n(); ++j) {
    for (int i = 0; i <= grid.n(); ++i) {
      mask.set(i, j, leq(grid.node(i, j), t));
    }
  }
  return mask;
}

namespace {

// Height of cell column i (between nodes i and i+1) inside the region.
double column_height(const LayerMask& lower, int i) noexcept {
  const int top = lower.column_top(i + 1);
  return top <= 0 ? 0.0 : lower.grid().coord(top);
}

}  // namespace

double region_area(const LayerMask& lower) {
  const GridSpec& grid = lower.grid();
  double area = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    area += (grid.coord(i + 1) - grid.coord(i)) * column_height(lower, i);
  }
  return area;
}

double layer_area_general(const UpperLayer& layer, const LayerMask& lower) {
  if (!lower.is_lower_layer()) {
    throw InvalidLayer("mask is not a lower layer");
  }
  const GridSpec& grid = lower.grid();
  double area = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    const double height = column_height(lower, i);
    if (height <= 0.0) {
      continue;
    }
    const double strip = area_in_rect(layer, {grid.coord(i + 1), height}) - area_in_rect(layer, {grid.coord(i), height});
    area += std::max(strip, 0.0);
  }
  return area;
}

bool region_contains(const LayerMask& lower, Point2 p) noexcept {
  const GridSpec& grid = lower.grid();
  for (int i = grid.n(); i >= 0 && grid.coord(i) >= p.t1; --i) {
    const int top = lower.column_top(i);
    if (top >= 0 && grid.coord(top) >= p.t2) {
      return true;
    }
  }
  return false;
}

void write_mask_csv(std::ostream& out, const LayerMask& mask) {
  const int n = mask.grid().n();
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      out << (i > 0 ? "," : "") << (mask.at(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

void write_mask_pgm(std::ostream& out, const LayerMask& mask) {
  const int n = mask.grid().n();
  out << "P2\n" << n + 1 << ' ' << n + 1 << "\n1\n";
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      out << (i > 0 ? " " : "") << (mask.at(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

LayerMask read_mask_csv(std::istream& in, double r) {
  std::vector<std::vector<bool>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<bool> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      if (cell == "0") {
        row.push_back(false);
      } else if (cell == "1") {
        row.push_back(true);
      } else {
        throw ParseError("mask cell must be 0 or 1, got '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) {
    throw ParseError("mask needs at least 2 rows");
  }
  const int n = static_cast<int>(rows.size()) - 1;
  LayerMask mask(GridSpec(r, n));
  for (int j = 0; j <= n; ++j) {
    if (rows[static_cast<std::size_t>(j)].size() != rows.size()) {
      throw ParseError("mask must be square");
    }
    for (int i = 0; i <= n; ++i) {
      mask.set(i, j, rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    }
  }
  return mask;
}

}  // namespace changeset
