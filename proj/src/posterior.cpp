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

#include "changeset/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "changeset/format.hpp"
#include "exp_kernel.hpp"

namespace changeset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponent weights of the Q integrand: a |A_t \ ξ| + b N(A_t ∩ ξ).
struct QWeights {
  double area;
  double count;
};

QWeights q_weights(const DetectionParams& params) {
  if (params.support_mode()) return {params.mu1, 0.0};
  return {params.jump(), std::log(params.mu1 / params.mu0)};
}

// log of a mean of exp(terms), plus the standard error of that mean.
QValue log_mean_exp(const std::vector<double>& terms, std::size_t samples) {
  if (terms.empty()) return {-kInf, 0.0};
  const double top = *std::max_element(terms.begin(), terms.end());
  double s1 = 0.0;
  double s2 = 0.0;
  for (const double x : terms) {
    const double e = std::exp(x - top);
    s1 += e;
    s2 += e * e;
  }
  const auto m = static_cast<double>(samples);
  const double log_value = top + std::log(s1 / m);
  double se = 0.0;
  if (samples > 1) {
    const double var = std::max(0.0, (s2 - s1 * s1 / m) / (m - 1.0));
    se = var > 0.0 ? std::exp(top + 0.5 * std::log(var / m)) : 0.0;
  }
  return {log_value, se};
}

double log_density(const PriorModel& prior, Point2 y) {
  if (prior.kind() == PriorKind::single_jump_exp) {
    const double g = prior.gamma();
    return 2.0 * std::log(g) - g * (y.t1 + y.t2);
  }
  const double f = prior.density_table()->density(y);
  return f > 0.0 ? std::log(f) : -kInf;
}

double log_density_bound(const PriorModel& prior) {
  if (prior.kind() == PriorKind::single_jump_exp) return 2.0 * std::log(prior.gamma());
  const DensityTable& table = *prior.density_table();
  double top = 0.0;
  for (int b = 0; b < table.grid().n(); ++b) {
    for (int a = 0; a < table.grid().n(); ++a) top = std::max(top, table.cell(a, b));
  }
  return top > 0.0 ? std::log(top) : 0.0;
}

// Sorted, deduplicated cut points of [0, end] including both ends.
std::vector<double> cuts(std::vector<double> inner, double end) {
  inner.push_back(0.0);
  inner.push_back(end);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  return inner;
}

double integrate_single_jump(const std::vector<Point2>& inside, const std::vector<double>& xs,
                             const std::vector<double>& ys, const PriorModel& prior, Point2 t, QWeights w,
                             double shift, const GaussLegendre& rule) {
  const double area = t.t1 * t.t2;
  double sum = 0.0;
  for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
    for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
      std::size_t count = 0;
      for (const Point2& p : inside) {
        if (p.t1 >= xs[a + 1] && p.t2 >= ys[b + 1]) ++count;
      }
      const double base = w.area * area + w.count * static_cast<double>(count) - shift;
      sum += rule.integrate(xs[a], xs[a + 1], ys[b], ys[b + 1], [&](double y1, double y2) {
        const double exponent = base - w.area * (t.t1 - y1) * (t.t2 - y2) + log_density(prior, {y1, y2});
        return std::exp(exponent);
      });
    }
  }
  return sum;
}

}  // namespace

std::string to_string(Estimator estimator) {
  return estimator == Estimator::exact_quadrature ? "exact-quadrature" : "common-random-numbers-MC";
}

Estimator parse_estimator(const std::string& text) {
  if (text == "exact" || text == "exact-quadrature") return Estimator::exact_quadrature;
  if (text == "mc" || text == "monte-carlo" || text == "common-random-numbers-MC") return Estimator::monte_carlo;
  throw InvalidArgument("unknown estimator '" + text + "'");
}

QEstimator QEstimator::exact(int quadrature_order) {
  QEstimator est;
  est.mode_ = Estimator::exact_quadrature;
  est.order_ = quadrature_order;
  est.rule_ = std::make_shared<const GaussLegendre>(quadrature_order);
  est.doubled_ = std::make_shared<const GaussLegendre>(2 * quadrature_order);
  return est;
}

QEstimator QEstimator::monte_carlo(const PriorModel& prior, double r, int q_samples, std::uint64_t seed) {
  if (q_samples < 1) throw InvalidArgument("q_samples must be at least 1");
  RandomStream rng = RandomStream::derive(seed, 0, "q-layers");
  std::vector<UpperLayer> layers;
  layers.reserve(static_cast<std::size_t>(q_samples));
  for (int k = 0; k < q_samples; ++k) layers.push_back(sample_changeset(prior, r, rng));
  return monte_carlo(std::move(layers), seed);
}

QEstimator QEstimator::monte_carlo(std::vector<UpperLayer> layers, std::uint64_t seed) {
  if (layers.empty()) throw InvalidArgument("q_samples must be at least 1");
  QEstimator est;
  est.mode_ = Estimator::monte_carlo;
  est.seed_ = seed;
  est.layers_ = std::move(layers);
  return est;
}

double log_lik_given_changeset(const PointPattern& n, const UpperLayer& xi, Point2 t, const DetectionParams& params) {
  const double area = t.t1 * t.t2;
  const double in_xi = area_in_rect(xi, t);
  const auto n_t = static_cast<double>(count_below(n, t));
  const auto n_xi = static_cast<double>(count_below_in_layer(n, xi, t));
  return -params.mu0 * area + n_t * std::log(params.mu0) - params.jump() * in_xi +
         n_xi * std::log(params.mu1 / params.mu0);
}

QValue q_exact_single_jump(const PointPattern& n, const PriorModel& prior, Point2 t, const DetectionParams& params,
                           const QEstimator& est) {
  if (!prior.is_single_jump()) throw InvalidArgument("exact quadrature needs a single-jump prior");
  if (est.mode() != Estimator::exact_quadrature) throw InvalidArgument("estimator is not exact-quadrature");
  if (t.t1 <= 0.0 || t.t2 <= 0.0) return {-kInf, 0.0};

  const QWeights w = q_weights(params);
  std::vector<Point2> inside;
  std::vector<double> inner_x;
  std::vector<double> inner_y;
  if (w.count != 0.0) {
    for (const Point2& p : n.points) {
      if (!leq(p, t)) continue;
      inside.push_back(p);
      if (p.t1 > 0.0 && p.t1 < t.t1) inner_x.push_back(p.t1);
      if (p.t2 > 0.0 && p.t2 < t.t2) inner_y.push_back(p.t2);
    }
  }
  if (prior.kind() == PriorKind::single_jump_density) {
    const GridSpec& table = prior.density_table()->grid();
    for (int k = 1; k <= table.n(); ++k) {
      const double c = table.coord(k);
      if (c < t.t1) inner_x.push_back(c);
      if (c < t.t2) inner_y.push_back(c);
    }
  }
  const std::vector<double> xs = cuts(std::move(inner_x), t.t1);
  const std::vector<double> ys = cuts(std::move(inner_y), t.t2);

  const double shift = w.area * t.t1 * t.t2 + w.count * static_cast<double>(inside.size()) + log_density_bound(prior);
  const double coarse = integrate_single_jump(inside, xs, ys, prior, t, w, shift, est.rule());
  const double fine = integrate_single_jump(inside, xs, ys, prior, t, w, shift, est.doubled_rule());
  if (std::abs(fine - coarse) > kQuadratureTolerance * std::abs(fine)) {
    std::ostringstream msg;
    msg << "Q at (" << t.t1 << ", " << t.t2 << ") changed from " << coarse << " to " << fine
        << " when the order was doubled";
    throw QuadratureNonConvergence(msg.str());
  }
  if (coarse <= 0.0) return {-kInf, 0.0};
  return {shift + std::log(coarse), 0.0};
}

QValue q_montecarlo(const PointPattern& n, const PriorModel& /*prior*/, Point2 t, const DetectionParams& params,
                    const QEstimator& est) {
  if (est.mode() != Estimator::monte_carlo) throw InvalidArgument("estimator is not Monte Carlo");
  const QWeights w = q_weights(params);
  const double area = t.t1 * t.t2;
  std::vector<double> terms;
  for (const UpperLayer& layer : est.shared_layers()) {
    if (!contains(layer, t)) continue;
    const double outside = area - area_in_rect(layer, t);
    double exponent = w.area * outside;
    if (w.count != 0.0) exponent += w.count * static_cast<double>(count_below_in_layer(n, layer, t));
    terms.push_back(exponent);
  }
  return log_mean_exp(terms, est.shared_layers().size());
}

QValue q_value(const PointPattern& n, const PriorModel& prior, Point2 t, const DetectionParams& params,
               const QEstimator& est) {
  return est.mode() == Estimator::exact_quadrature ? q_exact_single_jump(n, prior, t, params, est)
                                                   : q_montecarlo(n, prior, t, params, est);
}

PosteriorValue posterior_from_logs(double log_q, const QValue& q) {
  if (log_q == kInf) return {0.0, 0.0};
  if (q.log_value == -kInf) return {1.0, 0.0};
  const double x = log_q + q.log_value;
  double p;
  if (x <= 0.0) {
    p = 1.0 / (1.0 + std::exp(x));
  } else {
    const double e = std::exp(-x);
    p = e / (1.0 + e);
  }
  // dp/dQ = -p(1 - p)/Q
  const double se = q.se > 0.0 ? p * (1.0 - p) * std::exp(std::log(q.se) - q.log_value) : 0.0;
  return {p, se};
}

PosteriorValue posterior_no_change(const PointPattern& n, const PriorModel& prior, Point2 t,
                                   const DetectionParams& params, const QEstimator& est) {
  if (params.support_mode() && count_below(n, t) > 0) return {0.0, 0.0};
  return posterior_from_logs(log_q_factor(prior, t, params), q_value(n, prior, t, params, est));
}

double u_process(const UpperLayer& xi, const PriorModel& prior, Point2 t, const DetectionParams& params) {
  if (contains(xi, t)) return -params.c1;
  return -params.c1 + (params.c0 + params.c1 + params.k1 * weak_hazard(prior, t));
}

double v_from_posterior(const PriorModel& prior, Point2 t, const DetectionParams& params, double posterior) {
  if (posterior <= 0.0) return -params.c1;
  double hazard = 0.0;
  if (params.k1 != 0.0) {
    try {
      hazard = weak_hazard(prior, t);
    } catch (const DegenerateHazard&) {
      return -params.c1;
    }
  }
  return -params.c1 + (params.c0 + params.c1 + params.k1 * hazard) * posterior;
}

namespace {

PosteriorField empty_field(const PriorModel& prior, const DetectionParams& params, const GridSpec& grid,
                           const QEstimator& est) {
  PosteriorField field{grid, params, prior.describe(), est.mode(), 0, 0, est.seed(), {}, {}, {}};
  if (est.mode() == Estimator::monte_carlo) {
    field.q_samples = est.q_samples();
  } else {
    field.quadrature_order = est.quadrature_order();
  }
  field.values.assign(grid.node_count(), 0.0);
  field.posterior.assign(grid.node_count(), 0.0);
  field.posterior_se.assign(grid.node_count(), 0.0);
  return field;
}

void finish_node(PosteriorField& field, const PriorModel& prior, const PointPattern& n, int i, int j,
                 const QValue& q) {
  const Point2 t = field.grid.node(i, j);
  const std::size_t k = field.grid.index(i, j);
  PosteriorValue p{0.0, 0.0};
  if (!(field.params.support_mode() && count_below(n, t) > 0)) {
    p = posterior_from_logs(log_q_factor(prior, t, field.params), q);
  }
  field.posterior[k] = p.value;
  field.posterior_se[k] = p.se;
  field.values[k] = v_from_posterior(prior, t, field.params, p.value);
}

// Grid bin of a coordinate: the smallest node index whose coordinate is >= x.
int node_bin(const GridSpec& grid, double x) {
  int i = std::clamp(static_cast<int>(std::ceil(x / grid.step())), 0, grid.n());
  while (i > 0 && grid.coord(i - 1) >= x) --i;
  while (i < grid.n() && grid.coord(i) < x) ++i;
  return i;
}

struct BinnedPoint {
  int i;
  int j;
};

// Prefix integrals of a layer's height capped at the window side:
// S(x) = ∫_0^x min(s(u), r) du, at the grid coordinates and at the generators.
struct LayerProfile {
  std::vector<double> at_nodes;
  std::vector<double> at_generators;
};

LayerProfile layer_profile(const UpperLayer& layer, const std::vector<double>& coords, double r) {
  const auto gens = layer.generators();
  LayerProfile out{std::vector<double>(coords.size()), std::vector<double>(gens.size())};
  double pos = 0.0;
  double acc = 0.0;
  double height = r;
  std::size_t k = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    while (k < gens.size() && gens[k].t1 <= coords[i]) {
      const double x = std::max(gens[k].t1, 0.0);
      acc += (x - pos) * height;
      pos = x;
      out.at_generators[k] = acc;
      height = std::min(gens[k++].t2, r);
    }
    acc += (coords[i] - pos) * height;
    pos = coords[i];
    out.at_nodes[i] = acc;
  }
  for (; k < gens.size(); ++k) out.at_generators[k] = std::numeric_limits<double>::quiet_NaN();
  return out;
}

// Monte Carlo Q over the whole grid with shared layers, one grid row per
// task. For a row at height t2 a layer covers the nodes right of x*, the first
// generator at or below t2, and there
//   |A_t \ ξ| = t2 x* − S(x*) + S(t1).
// Each node sums its layer terms in layer order, so the result does not
// depend on the thread count.
std::vector<QValue> q_field_montecarlo(const PointPattern& n, const PriorModel& prior, const GridSpec& grid,
                                       const DetectionParams& params, const QEstimator& est) {
  const QWeights w = q_weights(params);
  const auto& layers = est.shared_layers();
  const int side = grid.n();
  const auto m = static_cast<double>(layers.size());
  std::vector<double> coords(grid.nodes_per_side());
  for (int i = 0; i <= side; ++i) coords[static_cast<std::size_t>(i)] = grid.coord(i);

  std::vector<LayerProfile> profiles(layers.size());
  std::vector<std::vector<BinnedPoint>> binned(layers.size());
#pragma omp parallel for schedule(static)
  for (long d = 0; d < static_cast<long>(layers.size()); ++d) {
    const auto u = static_cast<std::size_t>(d);
    profiles[u] = layer_profile(layers[u], coords, grid.r());
    if (w.count == 0.0) continue;
    for (const Point2& p : n.points) {
      if (p.t1 <= grid.r() && p.t2 <= grid.r() && contains(layers[u], p)) {
        binned[u].push_back({node_bin(grid, p.t1), node_bin(grid, p.t2)});
      }
    }
  }
  // Every term is bounded by this shift, so exp never overflows.
  const double shift = w.area * grid.r() * grid.r() + w.count * static_cast<double>(n.size());

  std::vector<QValue> out(grid.node_count(), QValue{-kInf, 0.0});
  std::vector<unsigned char> underflow(grid.node_count(), 0);

#pragma omp parallel
  {
    std::vector<double> s1(grid.nodes_per_side());
    std::vector<double> s2(grid.nodes_per_side());
    std::vector<double> exponent(grid.nodes_per_side());
    std::vector<int> counts(grid.nodes_per_side());

#pragma omp for schedule(dynamic)
    for (int j = 0; j <= side; ++j) {
      const double t2 = coords[static_cast<std::size_t>(j)];
      std::fill(s1.begin(), s1.end(), 0.0);
      std::fill(s2.begin(), s2.end(), 0.0);
      std::size_t lowest_hit = grid.nodes_per_side();

      for (std::size_t d = 0; d < layers.size(); ++d) {
        const auto gens = layers[d].generators();
        const auto k = static_cast<std::size_t>(
            std::partition_point(gens.begin(), gens.end(), [t2](const Point2& g) { return g.t2 > t2; }) -
            gens.begin());
        if (k == gens.size() || gens[k].t1 > grid.r()) continue;
        const double edge = std::max(gens[k].t1, 0.0);
        const auto begin = static_cast<std::size_t>(std::lower_bound(coords.begin(), coords.end(), edge) -
                                                     coords.begin());
        const std::size_t len = coords.size() - begin;
        const double base = t2 * edge - profiles[d].at_generators[k];
        const double* prefix = profiles[d].at_nodes.data() + begin;
        for (std::size_t u = 0; u < len; ++u) exponent[u] = w.area * (base + prefix[u]) - shift;
        if (!binned[d].empty()) {
          std::fill(counts.begin(), counts.end(), 0);
          for (const BinnedPoint& p : binned[d]) {
            if (p.j <= j) ++counts[static_cast<std::size_t>(p.i)];
          }
          int running = 0;
          for (std::size_t i = 0; i < coords.size(); ++i) {
            running += counts[i];
            if (i >= begin) exponent[i - begin] += w.count * running;
          }
        }
        detail::accumulate_exp(exponent.data(), len, s1.data() + begin, s2.data() + begin);
        lowest_hit = std::min(lowest_hit, begin);
      }

      for (int i = 0; i <= side; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const std::size_t idx = grid.index(i, j);
        if (u < lowest_hit) continue;
        if (s1[u] <= 0.0) {
          underflow[idx] = 1;
          continue;
        }
        double se = 0.0;
        if (m > 1.0) {
          const double var = std::max(0.0, (s2[u] - s1[u] * s1[u] / m) / (m - 1.0));
          se = var > 0.0 ? std::exp(shift + 0.5 * std::log(var / m)) : 0.0;
        }
        out[idx] = {shift + std::log(s1[u] / m), se};
      }
    }
  }

  // Terms too small for the global shift are redone with a per-node shift.
  for (int j = 0; j <= side; ++j) {
    for (int i = 0; i <= side; ++i) {
      if (underflow[grid.index(i, j)]) out[grid.index(i, j)] = q_montecarlo(n, prior, grid.node(i, j), params, est);
    }
  }
  return out;
}

PosteriorField field_impl(const PointPattern& n, const PriorModel& prior, const DetectionParams& params,
                          const GridSpec& grid, const QEstimator& est) {
  PosteriorField field = empty_field(prior, params, grid, est);
  const int side = grid.n();
  if (est.mode() == Estimator::monte_carlo) {
    const std::vector<QValue> q = q_field_montecarlo(n, prior, grid, params, est);
    for (int j = 0; j <= side; ++j) {
      for (int i = 0; i <= side; ++i) finish_node(field, prior, n, i, j, q[grid.index(i, j)]);
    }
    return field;
  }

  std::vector<QValue> q(grid.node_count());
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j <= side; ++j) {
    for (int i = 0; i <= side; ++i) {
      try {
        q[grid.index(i, j)] = q_exact_single_jump(n, prior, grid.node(i, j), params, est);
      } catch (const QuadratureNonConvergence& e) {
#pragma omp critical(changeset_field_failure)
        if (!failed) {
          failed = true;
          failure = e.what();
        }
      }
    }
  }
  if (failed) throw QuadratureNonConvergence(failure);
  for (int j = 0; j <= side; ++j) {
    for (int i = 0; i <= side; ++i) finish_node(field, prior, n, i, j, q[grid.index(i, j)]);
  }
  return field;
}

}  // namespace

PosteriorField v_field(const PointPattern& n, const PriorModel& prior, const DetectionParams& params,
                       const GridSpec& grid, const QEstimator& est) {
  params.validate(false);
  return field_impl(n, prior, params, grid, est);
}

PosteriorField v_field_support(const PointPattern& n, const PriorModel& prior, const DetectionParams& params,
                               const GridSpec& grid, const QEstimator& est) {
  params.validate(true);
  if (!params.support_mode()) throw InvalidArgument("support estimation needs mu0 = 0");
  return field_impl(n, prior, params, grid, est);
}

PosteriorField v_field_reference(const PointPattern& n, const PriorModel& prior, const DetectionParams& params,
                                 const GridSpec& grid, const QEstimator& est) {
  params.validate(true);
  PosteriorField field = empty_field(prior, params, grid, est);
  for (int j = 0; j <= grid.n(); ++j) {
    for (int i = 0; i <= grid.n(); ++i) {
      const Point2 t = grid.node(i, j);
      const PosteriorValue p = posterior_no_change(n, prior, t, params, est);
      const std::size_t k = grid.index(i, j);
      field.posterior[k] = p.value;
      field.posterior_se[k] = p.se;
      field.values[k] = v_from_posterior(prior, t, params, p.value);
    }
  }
  return field;
}

void write_field_csv(std::ostream& out, const PosteriorField& field) {
  out << "t1,t2,V\n";
  for (int j = 0; j <= field.grid.n(); ++j) {
    for (int i = 0; i <= field.grid.n(); ++i) {
      const Point2 t = field.grid.node(i, j);
      out << format_double(t.t1) << ',' << format_double(t.t2) << ',' << format_double(field.at(i, j)) << '\n';
    }
  }
}

void write_field_metadata(std::ostream& out, const PosteriorField& field) {
  const DetectionParams& p = field.params;
  out << "prior = " << field.prior_id << '\n'
      << "estimator = " << to_string(field.estimator) << '\n'
      << "q_samples = " << field.q_samples << '\n'
      << "quadrature_order = " << field.quadrature_order << '\n'
      << "seed = " << field.seed << '\n'
      << "grid.n = " << field.grid.n() << '\n'
      << "region.r = " << format_double(field.grid.r()) << '\n'
      << "obs.mu0 = " << format_double(p.mu0) << '\n'
      << "obs.mu1 = " << format_double(p.mu1) << '\n'
      << "gain.c0 = " << format_double(p.c0) << '\n'
      << "gain.c1 = " << format_double(p.c1) << '\n'
      << "gain.k0 = " << format_double(p.k0) << '\n'
      << "gain.k1 = " << format_double(p.k1) << '\n';
}

}  // namespace changeset
