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

#include "changeset/priors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <random>
#include <sstream>

namespace changeset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Length of [lo, hi] ∩ [0, x].
double overlap(double lo, double hi, double x) noexcept { return std::clamp(x, lo, hi) - lo; }

}  // namespace

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::single_jump_exp:
      return "single_jump_exp";
    case PriorKind::single_jump_density:
      return "single_jump_density";
    case PriorKind::first_line_poisson:
      return "first_line_poisson";
  }
  return "unknown";
}

PriorKind parse_prior_kind(const std::string& text) {
  if (text == "single_jump_exp") return PriorKind::single_jump_exp;
  if (text == "single_jump_density") return PriorKind::single_jump_density;
  if (text == "first_line_poisson") return PriorKind::first_line_poisson;
  throw InvalidArgument("unknown prior kind '" + text + "'");
}

DensityTable::DensityTable(GridSpec grid, std::vector<double> cell_values)
    : grid_(grid), values_(std::move(cell_values)) {
  const auto n = static_cast<std::size_t>(grid_.n());
  if (values_.size() != n * n) {
    throw InvalidArgument("density table must hold n*n cell values");
  }
  for (const double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("density table values must be finite and nonnegative");
    }
    total_ += v;
  }
  total_ *= grid_.step() * grid_.step();
  if (total_ > 1.0 + 1e-9) {
    throw InvalidArgument("density table integrates to more than 1 over its window");
  }
}

double DensityTable::density(Point2 y) const noexcept {
  if (y.t1 < 0.0 || y.t2 < 0.0 || y.t1 > grid_.r() || y.t2 > grid_.r()) {
    return 0.0;
  }
  const int n = grid_.n();
  const int a = std::min(static_cast<int>(y.t1 / grid_.step()), n - 1);
  const int b = std::min(static_cast<int>(y.t2 / grid_.step()), n - 1);
  return cell(a, b);
}

double DensityTable::cdf(Point2 t) const noexcept {
  const int n = grid_.n();
  double mass = 0.0;
  for (int b = 0; b < n; ++b) {
    const double wy = overlap(grid_.coord(b), grid_.coord(b + 1), t.t2);
    if (wy <= 0.0) break;
    for (int a = 0; a < n; ++a) {
      const double wx = overlap(grid_.coord(a), grid_.coord(a + 1), t.t1);
      if (wx <= 0.0) break;
      mass += cell(a, b) * wx * wy;
    }
  }
  return std::min(mass, 1.0);
}

DensityTable read_density_csv(std::istream& in, double r) {
  std::vector<double> values;
  std::string line;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::stringstream cells(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(cells, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("density value '" + cell + "' is not a number");
      }
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw ParseError("density table rows differ in length");
    ++rows;
  }
  if (rows == 0 || rows != cols) {
    throw ParseError("density table must be a nonempty square grid");
  }
  return DensityTable(GridSpec(r, static_cast<int>(rows)), std::move(values));
}

PriorModel PriorModel::single_jump_exp(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("prior gamma must be positive");
  return PriorModel(PriorKind::single_jump_exp, gamma, std::nullopt);
}

PriorModel PriorModel::first_line_poisson(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("prior gamma must be positive");
  return PriorModel(PriorKind::first_line_poisson, gamma, std::nullopt);
}

PriorModel PriorModel::single_jump_density(DensityTable table) {
  return PriorModel(PriorKind::single_jump_density, 1.0, std::move(table));
}

std::string PriorModel::describe() const {
  std::ostringstream out;
  out << to_string(kind_);
  if (kind_ == PriorKind::single_jump_density) {
    out << "(table n=" << table_->grid().n() << ", r=" << table_->grid().r() << ")";
  } else {
    out << "(gamma=" << gamma_ << ")";
  }
  return out.str();
}

void DetectionParams::validate(bool allow_support) const {
  const bool finite = std::isfinite(mu0) && std::isfinite(mu1) && std::isfinite(c0) && std::isfinite(c1) &&
                      std::isfinite(k0) && std::isfinite(k1) && std::isfinite(r);
  if (!finite) throw InvalidArgument("detection parameters must be finite");
  if (allow_support && mu0 == 0.0) {
    if (!(mu1 > 0.0)) throw InvalidArgument("support estimation needs mu1 > 0");
  } else if (!(mu1 > mu0 && mu0 > 0.0)) {
    throw InvalidArgument("intensities must satisfy mu1 > mu0 > 0");
  }
  if (!(c1 > 0.0)) throw InvalidArgument("c1 must be positive");
  if (c0 < 0.0) throw InvalidArgument("c0 must be nonnegative");
  if (k1 < 0.0) throw InvalidArgument("k1 must be nonnegative");
  if (!(r > 0.0)) throw InvalidArgument("window side r must be positive");
}

UpperLayer sample_changeset(const PriorModel& prior, double r, RandomStream& rng) {
  switch (prior.kind()) {
    case PriorKind::single_jump_exp: {
      const Point2 y{rng.exponential(prior.gamma()), rng.exponential(prior.gamma())};
      return normalize(std::span<const Point2>(&y, 1));
    }
    case PriorKind::single_jump_density: {
      const DensityTable& table = *prior.density_table();
      const int n = table.grid().n();
      const double h = table.grid().step();
      std::vector<double> weights;
      weights.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) + 1);
      for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) weights.push_back(table.cell(a, b) * h * h);
      }
      weights.push_back(std::max(0.0, 1.0 - table.total_mass()));
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      const std::size_t k = pick(rng.engine());
      Point2 y;
      if (k + 1 == weights.size()) {
        // Mass beyond the table: a generator that never meets the window.
        const double far = 2.0 * std::max(r, table.grid().r());
        y = {far, far};
      } else {
        const int a = static_cast<int>(k % static_cast<std::size_t>(n));
        const int b = static_cast<int>(k / static_cast<std::size_t>(n));
        y = {rng.uniform(table.grid().coord(a), table.grid().coord(a + 1)),
             rng.uniform(table.grid().coord(b), table.grid().coord(b + 1))};
      }
      return normalize(std::span<const Point2>(&y, 1));
    }
    case PriorKind::first_line_poisson: {
      const long count = rng.poisson(prior.gamma() * r * r);
      std::vector<Point2> points;
      points.reserve(static_cast<std::size_t>(count));
      for (long k = 0; k < count; ++k) {
        const double x = rng.uniform(0.0, r);
        const double y = rng.uniform(0.0, r);
        points.push_back({x, y});
      }
      return normalize(points);
    }
  }
  return {};
}

double log_prob_no_jump(const PriorModel& prior, Point2 t) {
  switch (prior.kind()) {
    case PriorKind::single_jump_exp: {
      // 1 - (1 - e^{-γ t1})(1 - e^{-γ t2}), exactly 1 on the axes.
      const double e1 = -std::expm1(-prior.gamma() * t.t1);
      const double e2 = -std::expm1(-prior.gamma() * t.t2);
      return std::log1p(-e1 * e2);
    }
    case PriorKind::single_jump_density: {
      const double f = prior.density_table()->cdf(t);
      return f >= 1.0 ? -kInf : std::log1p(-f);
    }
    case PriorKind::first_line_poisson:
      return -prior.gamma() * (t.t1 * t.t2);
  }
  return 0.0;
}

double prob_no_jump(const PriorModel& prior, Point2 t) { return std::exp(log_prob_no_jump(prior, t)); }

double weak_hazard(const PriorModel& prior, Point2 t) {
  switch (prior.kind()) {
    case PriorKind::single_jump_exp: {
      const double g = prior.gamma();
      return std::exp(2.0 * std::log(g) - g * (t.t1 + t.t2) - log_prob_no_jump(prior, t));
    }
    case PriorKind::single_jump_density: {
      const DensityTable& table = *prior.density_table();
      const double survival = 1.0 - table.cdf(t);
      if (survival <= 1e-12) {
        throw DegenerateHazard("1 - F_t vanishes at (" + std::to_string(t.t1) + ", " + std::to_string(t.t2) + ")");
      }
      return table.density(t) / survival;
    }
    case PriorKind::first_line_poisson:
      return prior.gamma();
  }
  return 0.0;
}

double log_q_factor(const PriorModel& prior, Point2 t, const DetectionParams& params) {
  const double area = t.t1 * t.t2;
  if (prior.kind() == PriorKind::first_line_poisson) {
    return (prior.gamma() - params.jump()) * area;
  }
  const double log_p = log_prob_no_jump(prior, t);
  if (log_p == -kInf) return kInf;
  return -params.jump() * area - log_p;
}

double q_factor(const PriorModel& prior, Point2 t, const DetectionParams& params) {
  return std::exp(log_q_factor(prior, t, params));
}

namespace {

struct SweepValue {
  double log_lambda;
  double log_q;
  bool degenerate;
};

SweepValue sweep_value(const PriorModel& prior, Point2 t, const DetectionParams& params) {
  SweepValue v{0.0, log_q_factor(prior, t, params), false};
  try {
    v.log_lambda = std::log(weak_hazard(prior, t));
  } catch (const DegenerateHazard&) {
    v.degenerate = true;
  }
  return v;
}

}  // namespace

ConditionReport check_theorem_conditions(const PriorModel& prior, const GridSpec& grid,
                                         const DetectionParams& params) {
  ConditionReport report;
  const double jump = params.jump();
  const double gamma = prior.gamma();
  switch (prior.kind()) {
    case PriorKind::first_line_poisson:
      report.analytic_applicable = true;
      report.analytic_pass = gamma >= jump;
      report.analytic_rule = "gamma >= mu1 - mu0";
      break;
    case PriorKind::single_jump_exp: {
      // Rescale time by sqrt(mu1 - mu0) per coordinate so the jump becomes 1.
      const double scale = std::sqrt(jump);
      const double g = gamma / scale;
      const double r = grid.r() * scale;
      report.analytic_applicable = true;
      report.analytic_pass = g > 1.0 && r <= std::log(g) / g;
      report.analytic_rule = "gamma' > 1 and r' <= ln(gamma')/gamma' after rescaling to mu1 - mu0 = 1";
      break;
    }
    case PriorKind::single_jump_density:
      report.analytic_applicable = false;
      report.analytic_rule = "none (numeric sweep only)";
      break;
  }

  const int n = grid.n();
  std::vector<SweepValue> values(grid.node_count());
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) values[grid.index(i, j)] = sweep_value(prior, grid.node(i, j), params);
  }

  auto record = [&](std::string function, int i, int j, int i2, int j2, double a, double b) {
    report.numeric_pass = false;
    report.violation = MonotonicityViolation{std::move(function), grid.node(i, j), grid.node(i2, j2), a, b};
  };

  for (int j = 0; j <= n && report.numeric_pass; ++j) {
    for (int i = 0; i <= n && report.numeric_pass; ++i) {
      const SweepValue& here = values[grid.index(i, j)];
      const int steps[2][2] = {{i + 1, j}, {i, j + 1}};
      for (const auto& step : steps) {
        const int i2 = step[0];
        const int j2 = step[1];
        if (i2 > n || j2 > n) continue;
        const SweepValue& next = values[grid.index(i2, j2)];
        if (here.degenerate || next.degenerate) {
          record("lambda", i, j, i2, j2, kInf, kInf);
          break;
        }
        if (next.log_lambda > here.log_lambda + kSweepTolerance) {
          record("lambda", i, j, i2, j2, std::exp(here.log_lambda), std::exp(next.log_lambda));
          break;
        }
        const bool both_infinite = here.log_q == kInf && next.log_q == kInf;
        if (!both_infinite && next.log_q < here.log_q - kSweepTolerance) {
          record("q", i, j, i2, j2, std::exp(here.log_q), std::exp(next.log_q));
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace changeset
