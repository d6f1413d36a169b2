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

#include "changeset/process.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "changeset/format.hpp"

namespace changeset {

namespace {

bool above_lower(double p, double lo) noexcept { return lo == 0.0 ? p >= 0.0 : p > lo; }

}  // namespace

std::size_t count_in_rect(const PointPattern& pattern, Point2 lo, Point2 hi) noexcept {
  std::size_t count = 0;
  for (const Point2& p : pattern.points) {
    if (above_lower(p.t1, lo.t1) && above_lower(p.t2, lo.t2) && p.t1 <= hi.t1 && p.t2 <= hi.t2) ++count;
  }
  return count;
}

std::size_t count_below(const PointPattern& pattern, Point2 t) noexcept {
  std::size_t count = 0;
  for (const Point2& p : pattern.points) {
    if (leq(p, t)) ++count;
  }
  return count;
}

std::size_t count_below_in_layer(const PointPattern& pattern, const UpperLayer& xi, Point2 t) noexcept {
  std::size_t count = 0;
  for (const Point2& p : pattern.points) {
    if (leq(p, t) && contains(xi, p)) ++count;
  }
  return count;
}

PointPattern sample_observation(const UpperLayer& xi, const DetectionParams& params, RandomStream& rng) {
  PointPattern pattern;
  pattern.r = params.r;
  const double area = params.r * params.r;
  if (params.mu0 > 0.0) {
    const long base = rng.poisson(params.mu0 * area);
    for (long k = 0; k < base; ++k) {
      const double x = rng.uniform(0.0, params.r);
      const double y = rng.uniform(0.0, params.r);
      pattern.points.push_back({x, y});
    }
  }
  const long extra = rng.poisson(params.jump() * area);
  for (long k = 0; k < extra; ++k) {
    const double x = rng.uniform(0.0, params.r);
    const double y = rng.uniform(0.0, params.r);
    if (contains(xi, {x, y})) pattern.points.push_back({x, y});
  }
  return pattern;
}

std::pair<UpperLayer, PointPattern> sample_pair(const PriorModel& prior, const DetectionParams& params,
                                                RandomStream& rng) {
  UpperLayer xi = sample_changeset(prior, params.r, rng);
  PointPattern n = sample_observation(xi, params, rng);
  return {std::move(xi), std::move(n)};
}

void write_points_csv(std::ostream& out, const std::vector<Point2>& points) {
  out << "x,y\n";
  for (const Point2& p : points) out << format_double(p.t1) << ',' << format_double(p.t2) << '\n';
}

std::vector<Point2> read_points_csv(std::istream& in) {
  std::vector<Point2> points;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("point row needs two comma-separated values: '" + line + "'");
    try {
      std::size_t used1 = 0;
      std::size_t used2 = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const double x = std::stod(a, &used1);
      const double y = std::stod(b, &used2);
      if (!(x >= 0.0) || !(y >= 0.0)) throw ParseError("point coordinates must be nonnegative: '" + line + "'");
      points.push_back({x, y});
    } catch (const std::invalid_argument&) {
      if (!first) throw ParseError("point row is not numeric: '" + line + "'");
    }
    first = false;
  }
  return points;
}

}  // namespace changeset
