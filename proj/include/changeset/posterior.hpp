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

#ifndef CHANGESET_POSTERIOR_HPP
#define CHANGESET_POSTERIOR_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "changeset/geometry.hpp"
#include "changeset/priors.hpp"
#include "changeset/process.hpp"
#include "changeset/quadrature.hpp"
#include "changeset/rng.hpp"

/**
 * \file
 * \brief Posterior of "no change yet" and the observable field V.
 *
 * For a node t the posterior probability that the change set has not reached
 * t given the data in A_t is 1 / (1 + q_t Q_t), where q_t comes from the prior
 * and Q_t is a prior expectation over change sets containing t:
 *
 *   Q_t = E[ 1{t in ξ} exp(a |A_t \ ξ|) exp(b N(A_t ∩ ξ)) ]
 *
 * with a = μ1 − μ0, b = log(μ1/μ0) for the main problem and a = μ1, b = 0
 * for support estimation (μ0 = 0). Q is carried as a logarithm throughout.
 */

namespace changeset {

enum class Estimator { exact_quadrature, monte_carlo };

[[nodiscard]] std::string to_string(Estimator estimator);
[[nodiscard]] Estimator parse_estimator(const std::string& text);

/// How Q_t is computed. Monte Carlo estimators hold one set of prior layers
/// that is reused for every node (common random numbers), which makes the
/// estimate nondecreasing in each coordinate of t sample path by sample path.
class QEstimator {
 public:
  [[nodiscard]] static QEstimator exact(int quadrature_order = 16);
  [[nodiscard]] static QEstimator monte_carlo(const PriorModel& prior, double r, int q_samples, std::uint64_t seed);
  [[nodiscard]] static QEstimator monte_carlo(std::vector<UpperLayer> layers, std::uint64_t seed);

  [[nodiscard]] Estimator mode() const noexcept { return mode_; }
  [[nodiscard]] int quadrature_order() const noexcept { return order_; }
  [[nodiscard]] int q_samples() const noexcept { return static_cast<int>(layers_.size()); }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<UpperLayer>& shared_layers() const noexcept { return layers_; }
  [[nodiscard]] const GaussLegendre& rule() const noexcept { return *rule_; }
  [[nodiscard]] const GaussLegendre& doubled_rule() const noexcept { return *doubled_; }

 private:
  QEstimator() = default;

  Estimator mode_{Estimator::monte_carlo};
  int order_{16};
  std::uint64_t seed_{0};
  std::vector<UpperLayer> layers_;
  std::shared_ptr<const GaussLegendre> rule_;
  std::shared_ptr<const GaussLegendre> doubled_;
};

/// Q_t as a logarithm (−inf when Q_t = 0) with the standard error of Q_t
/// itself (zero for quadrature).
struct QValue {
  double log_value;
  double se;
};

struct PosteriorValue {
  double value;
  double se;
};

/// Relative change allowed when the quadrature order is doubled.
inline constexpr double kQuadratureTolerance = 1e-8;

/// log ℓ_{N|ξ}(t) for the data restricted to A_t.
[[nodiscard]] double log_lik_given_changeset(const PointPattern& n, const UpperLayer& xi, Point2 t,
                                             const DetectionParams& params);

/// Q_t for single-jump priors by tensor Gauss–Legendre on the sub-rectangles
/// of [0,t] cut at observed coordinates (and table edges for tabulated
/// densities). Q_t = 0 on the axes.
///
/// \throws QuadratureNonConvergence if doubling the order moves the result
/// by more than kQuadratureTolerance relative.
[[nodiscard]] QValue q_exact_single_jump(const PointPattern& n, const PriorModel& prior, Point2 t,
                                         const DetectionParams& params, const QEstimator& est);

/// Q_t as the average over the estimator's shared layers.
[[nodiscard]] QValue q_montecarlo(const PointPattern& n, const PriorModel& prior, Point2 t,
                                  const DetectionParams& params, const QEstimator& est);

/// Dispatches on the estimator mode.
[[nodiscard]] QValue q_value(const PointPattern& n, const PriorModel& prior, Point2 t, const DetectionParams& params,
                             const QEstimator& est);

/// P(L_t = 0 | data on A_t). In support mode (μ0 = 0) the indicator
/// 1{N_t = 0} multiplies the result.
[[nodiscard]] PosteriorValue posterior_no_change(const PointPattern& n, const PriorModel& prior, Point2 t,
                                                 const DetectionParams& params, const QEstimator& est);

/// Combines log q_t and log Q_t into 1/(1 + q Q) without overflow.
[[nodiscard]] PosteriorValue posterior_from_logs(double log_q, const QValue& q);

/// U_t with the true (unobservable) ξ.
[[nodiscard]] double u_process(const UpperLayer& xi, const PriorModel& prior, Point2 t, const DetectionParams& params);

/// V_t = −c1 + (c0 + c1 + k1 λ_t) p, with V = −c1 wherever p = 0 or the
/// hazard is degenerate.
[[nodiscard]] double v_from_posterior(const PriorModel& prior, Point2 t, const DetectionParams& params,
                                      double posterior);

struct PosteriorField {
  GridSpec grid;
  DetectionParams params;
  std::string prior_id;
  Estimator estimator{Estimator::monte_carlo};
  int q_samples{0};
  int quadrature_order{0};
  std::uint64_t seed{0};
  std::vector<double> values;     // V_t, row-major
  std::vector<double> posterior;  // P(L_t = 0 | data)
  std::vector<double> posterior_se;

  [[nodiscard]] double at(int i, int j) const noexcept { return values[grid.index(i, j)]; }
};

/// V on every grid node; OpenMP-parallel over grid rows. Identical output
/// for any thread count.
///
/// \pre μ1 > μ0 > 0
[[nodiscard]] PosteriorField v_field(const PointPattern& n, const PriorModel& prior, const DetectionParams& params,
                                     const GridSpec& grid, const QEstimator& est);

/// The support-estimation field (μ0 = 0).
[[nodiscard]] PosteriorField v_field_support(const PointPattern& n, const PriorModel& prior,
                                             const DetectionParams& params, const GridSpec& grid,
                                             const QEstimator& est);

/// Serial node-by-node reference for v_field / v_field_support, built only
/// from posterior_no_change. Used to test the parallel kernel.
[[nodiscard]] PosteriorField v_field_reference(const PointPattern& n, const PriorModel& prior,
                                               const DetectionParams& params, const GridSpec& grid,
                                               const QEstimator& est);

/// "t1,t2,V" rows in node order.
void write_field_csv(std::ostream& out, const PosteriorField& field);
/// key = value block describing how the field was computed.
void write_field_metadata(std::ostream& out, const PosteriorField& field);

}  // namespace changeset

#endif  // CHANGESET_POSTERIOR_HPP
