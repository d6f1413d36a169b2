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
#include <omp.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "changeset/errors.hpp"
#include "changeset/posterior.hpp"

using namespace changeset;

namespace {

DetectionParams standard_params() {
  DetectionParams p;
  p.mu0 = 1.0;
  p.mu1 = 3.0;
  p.c0 = 1.0;
  p.c1 = 1.0;
  p.k0 = 0.0;
  p.k1 = 1.0;
  p.r = 1.0;
  return p;
}

PointPattern pattern(std::vector<Point2> pts) {
  PointPattern n;
  n.points = std::move(pts);
  return n;
}

}  // namespace

TEST_CASE("log likelihood given the change set") {
  DetectionParams p = standard_params();
  p.mu1 = 2.0;
  const UpperLayer xi = normalize(std::vector<Point2>{{0.5, 0.5}});
  CHECK(log_lik_given_changeset(PointPattern{}, UpperLayer{}, {0.6, 0.5}, p) == doctest::Approx(-0.3));
  const PointPattern one = pattern({{0.8, 0.8}});
  const double expected = -1.0 - 0.25 + std::log(2.0);
  CHECK(log_lik_given_changeset(one, xi, {1, 1}, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-0.5569).epsilon(1e-4));
  const PointPattern more = pattern({{0.8, 0.8}, {1.5, 0.2}});
  CHECK(log_lik_given_changeset(more, xi, {1, 1}, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("exact quadrature tends to the prior cdf for a vanishing jump") {
  const PriorModel prior = PriorModel::single_jump_exp(1.0);
  DetectionParams p = standard_params();
  p.mu1 = 1.0 + 1e-9;
  const QEstimator est = QEstimator::exact(16);
  const QValue q = q_exact_single_jump(PointPattern{}, prior, {1, 1}, p, est);
  const double cdf = (1 - std::exp(-1.0)) * (1 - std::exp(-1.0));
  CHECK(std::exp(q.log_value) == doctest::Approx(cdf).epsilon(1e-7));
  CHECK(q.se == 0.0);
}

TEST_CASE("exact and Monte Carlo Q agree") {
  const PriorModel prior = PriorModel::single_jump_exp(1.0);
  DetectionParams p = standard_params();
  p.mu1 = 2.0;
  const QEstimator exact = QEstimator::exact(16);
  const QEstimator mc = QEstimator::monte_carlo(prior, 1.0, 4096, 11);
  for (const PointPattern& n : {PointPattern{}, pattern({{0.3, 0.4}, {0.7, 0.9}, {0.5, 0.1}})}) {
    const QValue e = q_value(n, prior, {1, 1}, p, exact);
    const QValue m = q_value(n, prior, {1, 1}, p, mc);
    CHECK(std::abs(std::exp(e.log_value) - std::exp(m.log_value)) <= 3.0 * m.se);
  }
}

TEST_CASE("Monte Carlo Q respects the analytic sandwich") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 4096, 12);
  const QValue q = q_montecarlo(PointPattern{}, prior, {1, 1}, standard_params(), est);
  const double covered = 1.0 - std::exp(-2.0);
  CHECK(std::exp(q.log_value) >= covered);
  CHECK(std::exp(q.log_value) <= covered * std::exp(2.0));
}

TEST_CASE("axis nodes have posterior one") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 512, 13);
  const PointPattern n = pattern({{0.2, 0.3}});
  for (const Point2 t : {Point2{0, 0}, Point2{0, 0.7}, Point2{0.4, 0}}) {
    const QValue q = q_montecarlo(n, prior, t, standard_params(), est);
    CHECK(q.log_value == -std::numeric_limits<double>::infinity());
    CHECK(posterior_no_change(n, prior, t, standard_params(), est).value == 1.0);
  }
  const QValue e = q_exact_single_jump(n, PriorModel::single_jump_exp(1.0), {0, 0.5}, standard_params(),
                                       QEstimator::exact());
  CHECK(e.log_value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("zero prior mass of no change gives posterior zero") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(posterior_from_logs(inf, QValue{0.0, 0.0}).value == 0.0);
  CHECK(posterior_from_logs(0.0, QValue{-inf, 0.0}).value == 1.0);
  CHECK(posterior_from_logs(800.0, QValue{10.0, 0.0}).value == 0.0);
  CHECK(posterior_from_logs(std::log(3.0), QValue{0.0, 0.0}).value == doctest::Approx(0.25));

  // A table with all its mass below t makes P(L_t = 0) vanish.
  std::istringstream csv("4\n");
  const PriorModel prior = PriorModel::single_jump_density(read_density_csv(csv, 0.5));
  const QEstimator est = QEstimator::exact();
  CHECK(posterior_no_change(PointPattern{}, prior, {0.8, 0.8}, standard_params(), est).value == 0.0);
  CHECK(v_from_posterior(prior, {0.8, 0.8}, standard_params(), 0.0) == -1.0);
}

TEST_CASE("true-state process") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const UpperLayer xi = normalize(std::vector<Point2>{{0.5, 0.5}});
  CHECK(u_process(xi, prior, {0.7, 0.6}, standard_params()) == -1.0);
  CHECK(u_process(xi, prior, {0.2, 0.9}, standard_params()) == doctest::Approx(3.0));
}

TEST_CASE("kernel field matches the serial reference") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 1024, 14);
  const PointPattern n = pattern({{0.1, 0.8}, {0.45, 0.5}, {0.6, 0.65}, {0.9, 0.2}, {0.95, 0.95}});
  const GridSpec grid(1.0, 16);
  const PosteriorField fast = v_field(n, prior, standard_params(), grid, est);
  const PosteriorField slow = v_field_reference(n, prior, standard_params(), grid, est);
  REQUIRE(fast.values.size() == slow.values.size());
  for (std::size_t k = 0; k < fast.values.size(); ++k) {
    CHECK(fast.posterior[k] == doctest::Approx(slow.posterior[k]).epsilon(1e-10));
    CHECK(fast.values[k] == doctest::Approx(slow.values[k]).epsilon(1e-10));
  }
}

TEST_CASE("field output does not depend on the thread count") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 1024, 15);
  const PointPattern n = pattern({{0.3, 0.3}, {0.7, 0.4}, {0.2, 0.9}});
  const GridSpec grid(1.0, 32);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const PosteriorField one = v_field(n, prior, standard_params(), grid, est);
  omp_set_num_threads(4);
  const PosteriorField four = v_field(n, prior, standard_params(), grid, est);
  omp_set_num_threads(saved);
  CHECK(one.values == four.values);
  CHECK(one.posterior_se == four.posterior_se);

  const QEstimator exact = QEstimator::exact();
  const PriorModel jump = PriorModel::single_jump_exp(4.0);
  const GridSpec small(std::log(4.0) / 4.0, 8);
  omp_set_num_threads(1);
  const PosteriorField e1 = v_field(n, jump, standard_params(), small, exact);
  omp_set_num_threads(3);
  const PosteriorField e3 = v_field(n, jump, standard_params(), small, exact);
  omp_set_num_threads(saved);
  CHECK(e1.values == e3.values);
}

TEST_CASE("Monte Carlo Q is nondecreasing along rows and columns") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 512, 16);
  const PointPattern n = pattern({{0.25, 0.6}, {0.5, 0.5}, {0.8, 0.1}});
  const GridSpec grid(1.0, 12);
  auto logq = [&](int i, int j) { return q_montecarlo(n, prior, grid.node(i, j), standard_params(), est).log_value; };
  for (int i = 0; i <= 12; ++i) {
    for (int j = 0; j <= 12; ++j) {
      if (i < 12) CHECK(logq(i, j) <= logq(i + 1, j) + 1e-12);
      if (j < 12) CHECK(logq(i, j) <= logq(i, j + 1) + 1e-12);
    }
  }
}

TEST_CASE("exact Q is nondecreasing along rows and columns") {
  const PriorModel prior = PriorModel::single_jump_exp(4.0);
  const QEstimator est = QEstimator::exact();
  const PointPattern n = pattern({{0.1, 0.2}, {0.25, 0.05}});
  const GridSpec grid(std::log(4.0) / 4.0, 8);
  auto logq = [&](int i, int j) {
    return q_exact_single_jump(n, prior, grid.node(i, j), standard_params(), est).log_value;
  };
  for (int i = 1; i < 8; ++i) {
    for (int j = 1; j < 8; ++j) {
      CHECK(logq(i, j) <= logq(i + 1, j) + 1e-12);
      CHECK(logq(i, j) <= logq(i, j + 1) + 1e-12);
    }
  }
}

TEST_CASE("no reward for staying gives a nonpositive field") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  DetectionParams p = standard_params();
  p.c0 = 0.0;
  p.k1 = 0.0;
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 256, 17);
  const PosteriorField f = v_field(pattern({{0.5, 0.5}}), prior, p, GridSpec(1.0, 8), est);
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      CHECK(f.at(i, j) <= 0.0);
      if (i == 0 || j == 0) CHECK(f.at(i, j) == 0.0);
      else CHECK(f.at(i, j) < 0.0);
    }
  }
}

TEST_CASE("empty data gives a symmetric field") {
  const PriorModel prior = PriorModel::single_jump_exp(2.0);
  const PosteriorField f = v_field(PointPattern{}, prior, standard_params(), GridSpec(0.3, 6), QEstimator::exact());
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) CHECK(f.at(i, j) == doctest::Approx(f.at(j, i)).epsilon(1e-12));
  }
}

TEST_CASE("support field stops wherever a point has been seen") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  DetectionParams p = standard_params();
  p.mu0 = 0.0;
  p.mu1 = 2.0;
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 512, 18);
  const PointPattern n = pattern({{0.3, 0.55}, {0.7, 0.2}});
  const GridSpec grid(1.0, 10);
  const PosteriorField f = v_field_support(n, prior, p, grid, est);
  const PosteriorField ref = v_field_reference(n, prior, p, grid, est);
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const Point2 t = grid.node(i, j);
      if (count_below(n, t) > 0) CHECK(f.at(i, j) == -p.c1);
      CHECK(f.at(i, j) == doctest::Approx(ref.at(i, j)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS((void)v_field_support(n, prior, standard_params(), grid, est), InvalidArgument);
  CHECK_THROWS_AS((void)v_field(n, prior, p, grid, est), InvalidArgument);
}

TEST_CASE("an unresolved quadrature is reported") {
  // Order 1 cannot integrate the count-weighted exponential to 1e-8.
  const PriorModel prior = PriorModel::single_jump_exp(3.0);
  const QEstimator est = QEstimator::exact(1);
  CHECK_THROWS_AS((void)q_exact_single_jump(pattern({{0.2, 0.3}}), prior, {0.8, 0.8}, standard_params(), est),
                  QuadratureNonConvergence);
}

TEST_CASE("field CSV and metadata") {
  const PriorModel prior = PriorModel::first_line_poisson(2.0);
  const QEstimator est = QEstimator::monte_carlo(prior, 1.0, 64, 19);
  const PosteriorField f = v_field(PointPattern{}, prior, standard_params(), GridSpec(1.0, 2), est);
  std::ostringstream csv, meta;
  write_field_csv(csv, f);
  write_field_metadata(meta, f);
  CHECK(csv.str().rfind("t1,t2,V\n", 0) == 0);
  CHECK(meta.str().find("q_samples = 64") != std::string::npos);
}
