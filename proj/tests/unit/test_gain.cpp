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

#include <cmath>
#include <random>
#include <sstream>

#include "changeset/gain.hpp"
#include "changeset/process.hpp"
#include "changeset/quadrature.hpp"

using namespace changeset;

namespace {

DetectionParams costs(double c0, double c1, double k0, double k1) {
  DetectionParams p;
  p.mu0 = 1.0;
  p.mu1 = 3.0;
  p.c0 = c0;
  p.c1 = c1;
  p.k0 = k0;
  p.k1 = k1;
  p.r = 1.0;
  return p;
}

LayerMask random_lower_layer(const GridSpec& grid, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> height(-1, grid.n());
  LayerMask mask(grid);
  int cap = grid.n();
  for (int i = 0; i <= grid.n(); ++i) {
    cap = std::min(cap, height(gen));
    for (int j = 0; j <= cap; ++j) mask.set(i, j, true);
  }
  return mask;
}

}  // namespace

TEST_CASE("gain examples") {
  const UpperLayer xi = normalize(std::vector<Point2>{{1, 1}});
  const GridSpec grid(2.0, 4);
  CHECK(gain(LayerMask(grid), xi, costs(1, 2, 0.5, 3)) == 0.5);
  CHECK(gain(rectangle_mask(grid, {2, 2}), xi, costs(1, 2, 0, 3)) == doctest::Approx(4.0));
  CHECK(jumps_in_region(rectangle_mask(grid, {1, 1}), xi) == 1);
  CHECK(gain(rectangle_mask(grid, {1, 1}), xi, costs(1, 2, 0, 3)) == doctest::Approx(1.0 + 3.0));
  CHECK(gain(rectangle_mask(grid, {0.5, 2}), xi, costs(1, 2, 0.25, 3)) == doctest::Approx(1.0 + 0.25));
}

TEST_CASE("gain is affine in its costs") {
  std::mt19937_64 gen(41);
  const PriorModel prior = PriorModel::first_line_poisson(3.0);
  const GridSpec grid(1.0, 10);
  for (int trial = 0; trial < 30; ++trial) {
    RandomStream rng(100 + static_cast<std::uint64_t>(trial));
    const UpperLayer xi = sample_changeset(prior, 1.0, rng);
    const LayerMask b = random_lower_layer(grid, gen);
    const double base = gain(b, xi, costs(1.0, 2.0, 0.0, 0.5));
    CHECK(gain(b, xi, costs(1.0, 2.0, 1.5, 0.5)) == doctest::Approx(base + 1.5));
    CHECK(gain(b, xi, costs(3.0, 6.0, 0.0, 1.5)) == doctest::Approx(3.0 * base));
  }
}

TEST_CASE("clairvoyant gain bounds every lower layer pathwise") {
  std::mt19937_64 gen(42);
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const GridSpec grid(1.0, 12);
  const DetectionParams p = costs(1, 1, 0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    RandomStream rng(200 + static_cast<std::uint64_t>(trial));
    const UpperLayer xi = sample_changeset(prior, 1.0, rng);
    const double best = clairvoyant_gain(xi, grid, p);
    for (int k = 0; k < 5; ++k) CHECK(gain(random_lower_layer(grid, gen), xi, p) <= best + 1e-12);
  }
}

TEST_CASE("field integral uses cell averages") {
  const GridSpec grid(1.0, 2);
  std::vector<double> v(grid.node_count(), 1.0);
  CHECK(field_integral(LayerMask(grid, true), v) == doctest::Approx(1.0));
  CHECK(field_integral(rectangle_mask(grid, {0.5, 1.0}), v) == doctest::Approx(0.5));
  for (int i = 0; i <= 2; ++i) {
    for (int j = 0; j <= 2; ++j) v[grid.index(i, j)] = grid.coord(i) + grid.coord(j);
  }
  CHECK(field_integral(LayerMask(grid, true), v) == doctest::Approx(1.0));
}

TEST_CASE("compensator integral") {
  const GridSpec grid(1.0, 8);
  const LayerMask full(grid, true);
  CHECK(compensator_integral(PriorModel::first_line_poisson(2.0), full, UpperLayer{}) == doctest::Approx(2.0));
  const UpperLayer xi = normalize(std::vector<Point2>{{0.5, 0.5}});
  CHECK(compensator_integral(PriorModel::first_line_poisson(2.0), full, xi) == doctest::Approx(1.5));
  const PriorModel jump = PriorModel::single_jump_exp(1.0);
  const GaussLegendre rule(40);
  auto hazard = [&](double a, double b) { return weak_hazard(jump, {a, b}); };
  const double whole = rule.integrate(0.0, 1.0, 0.0, 1.0, hazard);
  const double quadrant = rule.integrate(0.5, 1.0, 0.5, 1.0, hazard);
  CHECK(compensator_integral(jump, full, UpperLayer{}) == doctest::Approx(whole).epsilon(1e-10));
  CHECK(compensator_integral(jump, full, xi) == doctest::Approx(whole - quadrant).epsilon(1e-10));
}

TEST_CASE("empty detector earns exactly the fixed reward") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const DetectionParams p = costs(1, 1, 0.75, 1);
  const MeanSe m = expected_gain(DetectorSpec::empty(), prior, p, GridSpec(1.0, 8), EstimatorConfig{}, 20, 43);
  CHECK(m.mean == 0.75);
  CHECK(m.se == 0.0);
}

TEST_CASE("paired report") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const DetectionParams p = costs(1, 1, 0, 1);
  const GridSpec grid(1.0, 16);
  EstimatorConfig est;
  est.q_samples = 256;
  std::vector<DetectorSpec> detectors{DetectorSpec::optimal(), DetectorSpec::clairvoyant()};
  for (const DetectorSpec& d : default_competitors(grid)) detectors.push_back(d);
  CHECK(detectors.size() == 13);
  const GainReport report = evaluate_detectors(detectors, prior, p, grid, est, 40, 44);
  CHECK(report.detectors.size() == 13);
  CHECK(report.differences.size() == 12);
  CHECK(report.find("empty").gain.mean == 0.0);
  CHECK(report.find("fixed-rectangle(0.25,0.5)").reps == 40);
  for (std::size_t rep = 0; rep < 40; ++rep) {
    for (std::size_t d = 0; d < detectors.size(); ++d) CHECK(report.per_rep[d][rep] <= report.per_rep[1][rep] + 1e-12);
  }
  const GainReport again = evaluate_detectors(detectors, prior, p, grid, est, 40, 44);
  CHECK(again.per_rep == report.per_rep);

  std::ostringstream summary, csv;
  write_gain_summary(summary, report);
  write_gain_csv(csv, report);
  CHECK(summary.str().find("reps = 40") != std::string::npos);
  CHECK(csv.str().rfind("rep,", 0) == 0);
}

TEST_CASE("projection identity for a fixed rectangle") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const GridSpec grid(1.0, 16);
  EstimatorConfig est;
  est.q_samples = 512;
  const ProjectionReport rect =
      projection_identity_check(prior, costs(1, 1, 0, 1), grid, est, 400, 45, DetectorSpec::rectangle({0.5, 0.75}));
  CHECK(rect.detector == "fixed-rectangle(0.5,0.75)");
  CHECK(rect.gap_pass());
  CHECK(rect.martingale_pass());

  const ProjectionReport no_jumps = projection_identity_check(prior, costs(1, 1, 0, 0), grid, est, 400, 46);
  CHECK(no_jumps.gap_pass());
}
