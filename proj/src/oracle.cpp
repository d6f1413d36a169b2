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

#include "changeset/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "changeset/errors.hpp"
#include "changeset/format.hpp"
#include "changeset/quadrature.hpp"

namespace changeset {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Self-normalised estimate of E[indicator] under weights exp(logw).
OracleEstimate weighted_fraction(const std::vector<double>& logw, const std::vector<std::uint8_t>& indicator) {
  OracleEstimate out;
  out.samples = logw.size();
  const double top = *std::max_element(logw.begin(), logw.end());
  if (top == kNegInf) throw InvalidArgument("observed points are impossible under every sampled change set");
  double sw = 0.0;
  double sw2 = 0.0;
  double swi = 0.0;
  std::vector<double> w(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k) {
    w[k] = std::exp(logw[k] - top);
    sw += w[k];
    sw2 += w[k] * w[k];
    if (indicator[k]) swi += w[k];
  }
  const double p = swi / sw;
  double spread = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double dev = (indicator[k] ? 1.0 : 0.0) - p;
    spread += w[k] * w[k] * dev * dev;
  }
  out.estimate = p;
  out.se = std::sqrt(spread) / sw;
  out.ess = sw * sw / sw2;
  out.ess_warning = out.ess < static_cast<double>(out.samples) / 20.0;
  return out;
}

// log of the ξ-dependent likelihood factor for the points in A_t.
double log_weight(const PointPattern& n, const UpperLayer& xi, Point2 t, const DetectionParams& params) {
  std::size_t inside = 0;
  std::size_t below = 0;
  for (const Point2& p : n.points) {
    if (!leq(p, t)) continue;
    ++below;
    if (xi.height_at(p.t1) <= p.t2) ++inside;
  }
  const double changed = area_in_rect(xi, t);
  if (params.mu0 == 0.0) {
    if (inside < below) return kNegInf;
    return -params.mu1 * changed + static_cast<double>(inside) * std::log(params.mu1);
  }
  return -(params.mu1 - params.mu0) * changed + static_cast<double>(inside) * std::log(params.mu1 / params.mu0);
}

double compensator_density(const PriorModel& prior, Point2 u) {
  const double p = prob_no_jump(prior, u);
  if (p <= 0.0) return 0.0;
  try {
    return weak_hazard(prior, u) * p;
  } catch (const DegenerateHazard&) {
    return 0.0;
  }
}

}  // namespace

OracleEstimate is_posterior_oracle(const PointPattern& n, const PriorModel& prior, Point2 t,
                                   const DetectionParams& params, int m, RandomStream& rng) {
  if (m < 100) throw InvalidArgument("importance sampling needs at least 100 draws");
  const double window = std::max({n.r, t.t1, t.t2});
  std::vector<double> logw(static_cast<std::size_t>(m));
  std::vector<std::uint8_t> clear(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < logw.size(); ++k) {
    const UpperLayer xi = sample_changeset(prior, window, rng);
    logw[k] = log_weight(n, xi, t, params);
    clear[k] = xi.height_at(t.t1) > t.t2 ? 1 : 0;
  }
  return weighted_fraction(logw, clear);
}

double compensator_quadrature(const PriorModel& prior, Point2 t, int order) {
  if (t.t1 <= 0.0 || t.t2 <= 0.0) return 0.0;
  const GaussLegendre rule(order);
  std::vector<double> xs{0.0, t.t1};
  std::vector<double> ys{0.0, t.t2};
  if (prior.kind() == PriorKind::single_jump_density) {
    const GridSpec& table = prior.density_table()->grid();
    for (int k = 1; k <= table.n(); ++k) {
      if (table.coord(k) < t.t1) xs.push_back(table.coord(k));
      if (table.coord(k) < t.t2) ys.push_back(table.coord(k));
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
  }
  double total = 0.0;
  for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
    for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
      total += rule.integrate(xs[a], xs[a + 1], ys[b], ys[b + 1],
                              [&](double u1, double u2) { return compensator_density(prior, {u1, u2}); });
    }
  }
  return total;
}

CompensatorVerdict compensator_oracle(const PriorModel& prior, Point2 t, int reps, RandomStream& rng) {
  if (reps < 1000) throw InvalidArgument("compensator check needs at least 1000 replications");
  const double window = std::max(t.t1, t.t2);
  double sum = 0.0;
  double sum2 = 0.0;
  for (int k = 0; k < reps; ++k) {
    const UpperLayer xi = sample_changeset(prior, window > 0.0 ? window : 1.0, rng);
    double count = 0.0;
    for (const Point2& g : xi.generators()) {
      if (leq(g, t)) count += 1.0;
    }
    sum += count;
    sum2 += count * count;
  }
  CompensatorVerdict v;
  const auto m = static_cast<double>(reps);
  v.mc_mean = sum / m;
  const double var = std::max(0.0, (sum2 - sum * sum / m) / (m - 1.0));
  v.mc_se = std::sqrt(var / m);
  v.quadrature = compensator_quadrature(prior, t);
  v.pass = std::abs(v.mc_mean - v.quadrature) <= 3.0 * v.mc_se;
  return v;
}

DiscreteBayesGrid discrete_bayes_oracle(const PointPattern& n, const PriorModel& prior, int k,
                                        const DetectionParams& params, int m, RandomStream& rng) {
  if (k < 1 || k > 8) throw InvalidArgument("discrete Bayes grid must have 1 to 8 cells per side");
  if (m < 100) throw InvalidArgument("discrete Bayes oracle needs at least 100 draws");
  const GridSpec nodes(n.r, k);
  const auto side = static_cast<std::size_t>(k);
  const double cell_area = nodes.step() * nodes.step();

  // Counts per cell; a point on a cell edge goes to the lower cell.
  std::vector<long> counts(side * side, 0);
  for (const Point2& p : n.points) {
    const auto a = static_cast<std::size_t>(std::clamp(static_cast<int>(std::ceil(p.t1 / nodes.step())) - 1, 0, k - 1));
    const auto b = static_cast<std::size_t>(std::clamp(static_cast<int>(std::ceil(p.t2 / nodes.step())) - 1, 0, k - 1));
    ++counts[b * side + a];
  }
  const auto cell_loglik = [&](double mu, long count) {
    if (mu == 0.0) return count > 0 ? kNegInf : 0.0;
    return -mu * cell_area + static_cast<double>(count) * std::log(mu * cell_area) - std::lgamma(count + 1.0);
  };

  const std::size_t node_total = nodes.node_count();
  std::vector<std::vector<double>> logw(node_total, std::vector<double>(static_cast<std::size_t>(m)));
  std::vector<std::vector<std::uint8_t>> clear(node_total, std::vector<std::uint8_t>(static_cast<std::size_t>(m)));
  std::vector<double> prefix(node_total);
  for (std::size_t d = 0; d < static_cast<std::size_t>(m); ++d) {
    const UpperLayer xi = sample_changeset(prior, n.r, rng);
    // prefix(i, j) = log-likelihood of the cells inside [0, node(i, j)].
    for (int j = 0; j <= k; ++j) {
      for (int i = 0; i <= k; ++i) {
        double v = 0.0;
        if (i > 0 && j > 0) {
          const Point2 centre{(i - 0.5) * nodes.step(), (j - 0.5) * nodes.step()};
          const bool changed = xi.height_at(centre.t1) <= centre.t2;
          const long c = counts[static_cast<std::size_t>(j - 1) * side + static_cast<std::size_t>(i - 1)];
          v = cell_loglik(changed ? params.mu1 : params.mu0, c) + prefix[nodes.index(i - 1, j)] +
              prefix[nodes.index(i, j - 1)] - prefix[nodes.index(i - 1, j - 1)];
          if (std::isnan(v)) v = kNegInf;
        }
        prefix[nodes.index(i, j)] = v;
        logw[nodes.index(i, j)][d] = v;
        const Point2 t = nodes.node(i, j);
        clear[nodes.index(i, j)][d] = xi.height_at(t.t1) > t.t2 ? 1 : 0;
      }
    }
  }
  DiscreteBayesGrid out{nodes, std::vector<double>(node_total), std::vector<double>(node_total)};
  for (std::size_t s = 0; s < node_total; ++s) {
    const OracleEstimate e = weighted_fraction(logw[s], clear[s]);
    out.posterior[s] = e.estimate;
    out.se[s] = e.se;
  }
  return out;
}

void write_verdict(std::ostream& out, const std::string& name, double estimate, double se, double reference,
                   bool pass) {
  out << name << ".estimate = " << format_double(estimate) << '\n'
      << name << ".se = " << format_double(se) << '\n'
      << name << ".reference = " << format_double(reference) << '\n'
      << name << ".verdict = " << (pass ? "pass" : "fail") << '\n';
}

}  // namespace changeset
