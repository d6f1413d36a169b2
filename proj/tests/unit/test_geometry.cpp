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

#include <doctest.h>

#include <sstream>
#include <vector>

#include "changeset/errors.hpp"
#include "changeset/geometry.hpp"
#include "changeset/rng.hpp"

using namespace changeset;

namespace {

UpperLayer layer(std::vector<Point2> pts) { return normalize(pts); }

std::vector<Point2> random_points(RandomStream& rng, int count, double r) {
  std::vector<Point2> pts;
  for (int k = 0; k < count; ++k) pts.push_back({rng.uniform(0.0, r), rng.uniform(0.0, r)});
  return pts;
}

}  // namespace

TEST_CASE("componentwise order") {
  CHECK(leq({1, 2}, {2, 3}));
  CHECK_FALSE(leq({1, 3}, {2, 1}));
  CHECK_FALSE(leq({2, 1}, {1, 3}));
  CHECK(leq({2, 2}, {2, 2}));
}

TEST_CASE("order laws on random points") {
  RandomStream rng(11);
  for (int k = 0; k < 2000; ++k) {
    // Coarse coordinates so that ties occur.
    const auto draw = [&] { return Point2{std::floor(rng.uniform(0, 4)), std::floor(rng.uniform(0, 4))}; };
    const Point2 a = draw(), b = draw(), c = draw();
    CHECK(leq(a, a));
    if (leq(a, b) && leq(b, a)) CHECK(a == b);
    if (leq(a, b) && leq(b, c)) CHECK(leq(a, c));
  }
}

TEST_CASE("strict order with the axis branch") {
  CHECK(strictly_below({1, 1}, {2, 2}));
  CHECK(strictly_below({0, 0}, {0, 0}));
  CHECK(strictly_below({0, 1}, {0, 2}));
  CHECK_FALSE(strictly_below({0.5, 1}, {0, 2}));
  CHECK_FALSE(strictly_below({1, 1}, {1, 2}));
}

TEST_CASE("membership in a closed upper layer") {
  CHECK_FALSE(contains(layer({{1, 1}}), {0.5, 3}));
  CHECK(contains(layer({{1, 1}}), {1, 1}));
  CHECK_FALSE(contains(layer({{1, 3}, {2, 1}}), {1.5, 2}));
  CHECK_FALSE(contains(UpperLayer{}, {5, 5}));
}

TEST_CASE("normalisation keeps the minimal antichain") {
  CHECK(layer({{1, 1}, {2, 2}}) == layer({{1, 1}}));
  CHECK(layer({}).empty());
  const UpperLayer l = layer({{1, 3}, {2, 1}, {2, 3}});
  REQUIRE(l.size() == 2);
  CHECK(l.generators()[0] == Point2{1, 3});
  CHECK(l.generators()[1] == Point2{2, 1});
  CHECK(layer({{1, 1}, {1, 1}}).size() == 1);
}

TEST_CASE("normalisation is idempotent and preserves membership") {
  RandomStream rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const auto pts = random_points(rng, 8, 1.0);
    const UpperLayer once = normalize(pts);
    const UpperLayer twice = normalize(once.generators());
    CHECK(once == twice);
    for (std::size_t a = 0; a < once.size(); ++a) {
      for (std::size_t b = 0; b < once.size(); ++b) {
        if (a != b) CHECK_FALSE(leq(once.generators()[a], once.generators()[b]));
      }
    }
    for (int k = 0; k < 50; ++k) {
      const Point2 t{rng.uniform(0, 1.2), rng.uniform(0, 1.2)};
      bool direct = false;
      for (const Point2& p : pts) direct = direct || leq(p, t);
      CHECK(contains(once, t) == direct);
    }
  }
}

TEST_CASE("area of the layer inside a rectangle") {
  CHECK(area_in_rect(layer({{1, 1}}), {2, 2}) == doctest::Approx(1.0));
  CHECK(area_in_rect(UpperLayer{}, {3, 7}) == 0.0);
  CHECK(area_in_rect(layer({{1, 3}, {2, 1}}), {3, 4}) == doctest::Approx(4.0));
  CHECK(complement_area_in_rect(layer({{1, 3}, {2, 1}}), {3, 4}) == doctest::Approx(8.0));
}

TEST_CASE("area is bounded and nondecreasing") {
  RandomStream rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const UpperLayer l = normalize(random_points(rng, 5, 1.0));
    double prev = 0.0;
    double prev_c = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const Point2 t{k / 40.0, 0.7};
      const double a = area_in_rect(l, t);
      const double c = complement_area_in_rect(l, t);
      CHECK(a >= 0.0);
      CHECK(a <= t.t1 * t.t2 + 1e-15);
      CHECK(a >= prev);
      CHECK(c >= prev_c);
      prev = a;
      prev_c = c;
    }
  }
}

TEST_CASE("staircase area against a rasterised sum") {
  RandomStream rng(14);
  const int n = 2048;
  const double r = 1.0;
  for (int rep = 0; rep < 20; ++rep) {
    const UpperLayer l = normalize(random_points(rng, 1 + rep % 5, r));
    const Point2 t{rng.uniform(0.3, r), rng.uniform(0.3, r)};
    const double h1 = t.t1 / n;
    const double h2 = t.t2 / n;
    double raster = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * h1;
      const double height = l.height_at(x);
      // Cells of the column with centre at or above the staircase.
      if (height <= t.t2) {
        const double from = std::ceil(height / h2 - 0.5);
        raster += (n - std::max(0.0, from)) * h1 * h2;
      }
    }
    CHECK(std::abs(area_in_rect(l, t) - raster) <= 4.0 * r * r / n);
  }
}

TEST_CASE("grid nodes and masks") {
  const GridSpec g(2.0, 4);
  CHECK(g.coord(4) == 2.0);
  CHECK(g.node_count() == 25);
  CHECK_THROWS_AS(GridSpec(0.0, 4), InvalidArgument);
  CHECK_THROWS_AS(GridSpec(1.0, 0), InvalidArgument);

  const LayerMask rect = rectangle_mask(g, {1.0, 1.5});
  CHECK(rect.is_lower_layer());
  CHECK(rect.count() == 3 * 4);
  CHECK(region_area(rect) == doctest::Approx(1.5));
  CHECK(region_contains(rect, {0.9, 1.2}));
  CHECK_FALSE(region_contains(rect, {1.1, 0.2}));
}

TEST_CASE("layer area over a mask") {
  const GridSpec g(2.0, 4);
  CHECK(layer_area_general(layer({{1, 1}}), LayerMask(g, true)) == doctest::Approx(area_in_rect(layer({{1, 1}}), {2, 2})));
  CHECK(layer_area_general(layer({{1, 1}}), LayerMask(g, false)) == 0.0);
  CHECK(layer_area_general(layer({{1, 1}}), rectangle_mask(g, {1, 1})) == 0.0);

  LayerMask bad(g);
  bad.set(2, 2, true);
  CHECK_THROWS_AS((void)layer_area_general(layer({{1, 1}}), bad), InvalidLayer);
}

TEST_CASE("layer area over staircase masks matches the continuum") {
  RandomStream rng(15);
  const GridSpec g(1.0, 16);
  for (int rep = 0; rep < 50; ++rep) {
    const UpperLayer l = normalize(random_points(rng, 4, 1.0));
    // Random lower layer from a nonincreasing column profile.
    LayerMask mask(g);
    int top = g.n();
    for (int i = 0; i <= g.n(); ++i) {
      top = std::max(-1, top - static_cast<int>(rng.uniform(0, 3)));
      for (int j = 0; j <= top; ++j) mask.set(i, j, true);
    }
    REQUIRE(mask.is_lower_layer());
    // The region is a union of cells; sum cell by cell with exact rectangle areas.
    double expected = 0.0;
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) {
        if (!mask.at(i + 1, j + 1)) continue;
        const double x0 = g.coord(i), x1 = g.coord(i + 1), y0 = g.coord(j), y1 = g.coord(j + 1);
        expected += area_in_rect(l, {x1, y1}) - area_in_rect(l, {x0, y1}) - area_in_rect(l, {x1, y0}) +
                    area_in_rect(l, {x0, y0});
      }
    }
    CHECK(layer_area_general(l, mask) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("upper and lower layer flags") {
  const GridSpec g(1.0, 3);
  LayerMask upper(g);
  for (int j = 0; j <= 3; ++j) {
    for (int i = 0; i <= 3; ++i) upper.set(i, j, i + j >= 4);
  }
  CHECK(upper.is_upper_layer());
  CHECK_FALSE(upper.is_lower_layer());
}

TEST_CASE("mask serialisation round trip") {
  const GridSpec g(1.0, 3);
  const LayerMask m = rectangle_mask(g, {2.0 / 3.0, 1.0 / 3.0});
  std::stringstream csv;
  write_mask_csv(csv, m);
  CHECK(csv.str().substr(0, 8) == "1,1,1,0\n");
  CHECK(read_mask_csv(csv, 1.0) == m);

  std::ostringstream pgm;
  write_mask_pgm(pgm, m);
  CHECK(pgm.str().rfind("P2\n4 4\n1\n", 0) == 0);
}
