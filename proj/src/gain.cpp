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

#include "changeset/gain.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <sstream>

#include "changeset/errors.hpp"
#include "changeset/format.hpp"
#include "changeset/process.hpp"
#include "changeset/quadrature.hpp"
#include "changeset/rng.hpp"

namespace changeset {

namespace {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (const double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

std::vector<double> inner_cuts(double lo, double hi, std::initializer_list<double> extra,
                               const std::vector<double>& more) {
  std::vector<double> c{lo, hi};
  for (const double v : extra) {
    if (v > lo && v < hi) c.push_back(v);
  }
  for (const double v : more) {
    if (v > lo && v < hi) c.push_back(v);
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

double hazard_or_zero(const PriorModel& prior, Point2 u) {
  try {
    return weak_hazard(prior, u);
  } catch (const DegenerateHazard&) {
    return 0.0;
  }
}

LayerMask detector_region(const DetectorSpec& d, const GridSpec& grid, const StoppingSet* rho,
                          const StoppingSet& baseline) {
  switch (d.kind) {
    case DetectorKind::optimal:
      return rho->member;
    case DetectorKind::no_info:
      return baseline.member;
    case DetectorKind::rectangle:
      return rectangle_mask(grid, d.corner);
    case DetectorKind::empty:
    case DetectorKind::clairvoyant:
      break;
  }
  return LayerMask(grid);
}

}  // namespace

std::size_t jumps_in_region(const LayerMask& region, const UpperLayer& xi) {
  std::size_t count = 0;
  for (const Point2& g : xi.generators()) {
    if (region_contains(region, g)) ++count;
  }
  return count;
}

double gain(const LayerMask& region, const UpperLayer& xi, const DetectionParams& params) {
  const double changed = layer_area_general(xi, region);
  const double unchanged = std::max(0.0, region_area(region) - changed);
  double z = params.c0 * unchanged - params.c1 * changed + params.k0;
  if (params.k1 != 0.0) z += params.k1 * static_cast<double>(jumps_in_region(region, xi));
  return z;
}

double gain(const StoppingSet& rho, const UpperLayer& xi, const DetectionParams& params) {
  return gain(rho.member, xi, params);
}

double clairvoyant_gain(const UpperLayer& xi, const GridSpec& grid, const DetectionParams& params) {
  const Point2 corner{grid.r(), grid.r()};
  const double unchanged = complement_area_in_rect(xi, corner);
  std::size_t jumps = 0;
  for (const Point2& g : xi.generators()) {
    if (leq(g, corner)) ++jumps;
  }
  return params.c0 * unchanged + params.k0 + params.k1 * static_cast<double>(jumps);
}

double field_integral(const LayerMask& region, std::span<const double> values) {
  const GridSpec& grid = region.grid();
  if (values.size() != grid.node_count()) throw InvalidArgument("field size does not match the grid");
  double total = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    const double width = grid.coord(i + 1) - grid.coord(i);
    for (int j = 0; j < grid.n() && region.at(i + 1, j + 1); ++j) {
      const double height = grid.coord(j + 1) - grid.coord(j);
      const double corners = values[grid.index(i, j)] + values[grid.index(i + 1, j)] +
                             values[grid.index(i, j + 1)] + values[grid.index(i + 1, j + 1)];
      total += 0.25 * corners * width * height;
    }
  }
  return total;
}

double compensator_integral(const PriorModel& prior, const LayerMask& region, const UpperLayer& xi) {
  if (prior.kind() == PriorKind::first_line_poisson) {
    const double changed = layer_area_general(xi, region);
    return prior.gamma() * std::max(0.0, region_area(region) - changed);
  }
  // Single jump: ξ is the quadrant above its generator, if any.
  static const GaussLegendre rule(16);
  const GridSpec& grid = region.grid();
  const bool has_jump = !xi.empty();
  const Point2 g = has_jump ? xi.generators().front() : Point2{0.0, 0.0};
  std::vector<double> edges;
  if (prior.kind() == PriorKind::single_jump_density) {
    const GridSpec& table = prior.density_table()->grid();
    for (int k = 1; k < table.n(); ++k) edges.push_back(table.coord(k));
  }
  double total = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    const int top = region.column_top(i + 1);
    if (top <= 0) continue;
    const auto xs = inner_cuts(grid.coord(i), grid.coord(i + 1), {has_jump ? g.t1 : -1.0}, edges);
    const auto ys = inner_cuts(0.0, grid.coord(top), {has_jump ? g.t2 : -1.0}, edges);
    for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
      for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
        if (has_jump && xs[a] >= g.t1 && ys[b] >= g.t2) continue;
        total += rule.integrate(xs[a], xs[a + 1], ys[b], ys[b + 1],
                                [&](double u1, double u2) { return hazard_or_zero(prior, {u1, u2}); });
      }
    }
  }
  return total;
}

QEstimator EstimatorConfig::build(const PriorModel& prior, double r, std::uint64_t seed) const {
  if (mode == Estimator::exact_quadrature) return QEstimator::exact(quadrature_order);
  return QEstimator::monte_carlo(prior, r, q_samples, seed);
}

std::string DetectorSpec::name() const {
  switch (kind) {
    case DetectorKind::optimal:
      return "optimal-rho-hat";
    case DetectorKind::no_info:
      return "no-info-baseline";
    case DetectorKind::rectangle:
      return "fixed-rectangle(" + format_double(corner.t1) + "," + format_double(corner.t2) + ")";
    case DetectorKind::clairvoyant:
      return "clairvoyant";
    case DetectorKind::empty:
      return "empty";
  }
  return "unknown";
}

std::vector<DetectorSpec> default_competitors(const GridSpec& grid) {
  std::vector<DetectorSpec> out{DetectorSpec::no_info(), DetectorSpec::empty()};
  const int n = grid.n();
  const int lattice[3] = {n / 4, n / 2, (3 * n) / 4};
  for (const int b : lattice) {
    for (const int a : lattice) out.push_back(DetectorSpec::rectangle(grid.node(a, b)));
  }
  return out;
}

MeanSe mean_se(std::span<const double> samples) {
  if (samples.empty()) return {};
  const auto m = static_cast<double>(samples.size());
  const double mean = pairwise_sum(samples) / m;
  if (samples.size() < 2) return {mean, 0.0};
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
  const double var = pairwise_sum(sq) / (m - 1.0);
  return {mean, std::sqrt(var / m)};
}

const DetectorSummary& GainReport::find(const std::string& name) const {
  for (const DetectorSummary& d : detectors) {
    if (d.name == name) return d;
  }
  throw InvalidArgument("no detector named '" + name + "'");
}

MeanSe GainReport::difference(std::size_t first, std::size_t second) const {
  std::vector<double> d(reps);
  for (std::size_t k = 0; k < reps; ++k) d[k] = per_rep[first][k] - per_rep[second][k];
  return mean_se(d);
}

GainReport evaluate_detectors(std::span<const DetectorSpec> detectors, const PriorModel& prior,
                              const DetectionParams& params, const GridSpec& grid, const EstimatorConfig& est,
                              std::size_t reps, std::uint64_t seed) {
  if (reps < 2) throw InvalidArgument("at least two replications are needed");
  if (detectors.empty()) throw InvalidArgument("no detectors to evaluate");
  params.validate(true);

  const bool needs_field = std::any_of(detectors.begin(), detectors.end(),
                                       [](const DetectorSpec& d) { return d.kind == DetectorKind::optimal; });
  const StoppingSet baseline = no_info_baseline(prior, params, grid);

  GainReport report;
  report.prior = prior.describe();
  report.params = params;
  report.grid = grid;
  report.seed = seed;
  report.reps = reps;
  report.per_rep.assign(detectors.size(), std::vector<double>(reps, 0.0));

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < static_cast<long>(reps); ++k) {
    try {
      const auto rep = static_cast<std::uint64_t>(k);
      RandomStream xi_rng = RandomStream::derive(seed, rep, "changeset");
      RandomStream obs_rng = RandomStream::derive(seed, rep, "observation");
      const UpperLayer xi = sample_changeset(prior, grid.r(), xi_rng);
      const PointPattern n = sample_observation(xi, params, obs_rng);

      std::optional<StoppingSet> rho;
      if (needs_field) {
        const QEstimator q = est.build(prior, grid.r(), RandomStream::derive_seed(seed, rep, "q-layers"));
        const PosteriorField field = params.support_mode() ? v_field_support(n, prior, params, grid, q)
                                                           : v_field(n, prior, params, grid, q);
        rho = stopping_set_from_field(field);
      }
      for (std::size_t d = 0; d < detectors.size(); ++d) {
        double z;
        if (detectors[d].kind == DetectorKind::clairvoyant) {
          z = clairvoyant_gain(xi, grid, params);
        } else {
          z = gain(detector_region(detectors[d], grid, rho ? &*rho : nullptr, baseline), xi, params);
        }
        report.per_rep[d][static_cast<std::size_t>(k)] = z;
      }
    } catch (...) {
#pragma omp critical(changeset_gain_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t d = 0; d < detectors.size(); ++d) {
    report.detectors.push_back({detectors[d].name(), mean_se(report.per_rep[d]), reps});
  }
  for (std::size_t d = 1; d < detectors.size(); ++d) {
    report.differences.push_back({report.detectors[0].name, report.detectors[d].name, report.difference(0, d)});
  }
  return report;
}

MeanSe expected_gain(const DetectorSpec& detector, const PriorModel& prior, const DetectionParams& params,
                     const GridSpec& grid, const EstimatorConfig& est, std::size_t reps, std::uint64_t seed) {
  const DetectorSpec one[1] = {detector};
  return evaluate_detectors(one, prior, params, grid, est, reps, seed).detectors.front().gain;
}

ProjectionReport projection_identity_check(const PriorModel& prior, const DetectionParams& params,
                                           const GridSpec& grid, const EstimatorConfig& est, std::size_t reps,
                                           std::uint64_t seed, const DetectorSpec& detector) {
  if (reps < 2) throw InvalidArgument("at least two replications are needed");
  if (detector.kind != DetectorKind::optimal && detector.kind != DetectorKind::rectangle &&
      detector.kind != DetectorKind::empty) {
    throw InvalidArgument("projection check needs a stopping set, got " + detector.name());
  }
  params.validate(true);

  ProjectionReport report;
  report.reps = reps;
  report.detector = detector.name();
  report.gaps.assign(reps, 0.0);
  report.martingales.assign(reps, 0.0);
  const StoppingSet unused{LayerMask(grid), ""};

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < static_cast<long>(reps); ++k) {
    try {
      const auto rep = static_cast<std::uint64_t>(k);
      RandomStream xi_rng = RandomStream::derive(seed, rep, "changeset");
      RandomStream obs_rng = RandomStream::derive(seed, rep, "observation");
      const UpperLayer xi = sample_changeset(prior, grid.r(), xi_rng);
      const PointPattern n = sample_observation(xi, params, obs_rng);
      const QEstimator q = est.build(prior, grid.r(), RandomStream::derive_seed(seed, rep, "q-layers"));
      const PosteriorField field = params.support_mode() ? v_field_support(n, prior, params, grid, q)
                                                         : v_field(n, prior, params, grid, q);
      const StoppingSet rho = stopping_set_from_field(field);
      const LayerMask region = detector_region(detector, grid, &rho, unused);

      const auto u = static_cast<std::size_t>(k);
      report.gaps[u] = gain(region, xi, params) - params.k0 - field_integral(region, field.values);
      report.martingales[u] =
          static_cast<double>(jumps_in_region(region, xi)) - compensator_integral(prior, region, xi);
    } catch (...) {
#pragma omp critical(changeset_projection_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  report.gap = mean_se(report.gaps);
  report.martingale = mean_se(report.martingales);
  return report;
}

void write_gain_summary(std::ostream& out, const GainReport& report) {
  out << "prior = " << report.prior << '\n'
      << "seed = " << report.seed << '\n'
      << "reps = " << report.reps << '\n'
      << "grid.n = " << report.grid.n() << '\n'
      << "region.r = " << format_double(report.grid.r()) << '\n';
  for (const DetectorSummary& d : report.detectors) {
    out << "detector." << d.name << ".mean = " << format_double(d.gain.mean) << '\n'
        << "detector." << d.name << ".se = " << format_double(d.gain.se) << '\n';
  }
  for (const PairedDifference& p : report.differences) {
    out << "diff." << p.first << ".minus." << p.second << ".mean = " << format_double(p.diff.mean) << '\n'
        << "diff." << p.first << ".minus." << p.second << ".se = " << format_double(p.diff.se) << '\n';
  }
}

void write_gain_csv(std::ostream& out, const GainReport& report) {
  out << "rep";
  for (const DetectorSummary& d : report.detectors) out << ",\"" << d.name << '"';
  out << '\n';
  for (std::size_t k = 0; k < report.reps; ++k) {
    out << k;
    for (const auto& column : report.per_rep) out << ',' << format_double(column[k]);
    out << '\n';
  }
}

}  // namespace changeset
