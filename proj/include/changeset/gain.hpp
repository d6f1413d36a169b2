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

#ifndef CHANGESET_GAIN_HPP
#define CHANGESET_GAIN_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "changeset/detector.hpp"
#include "changeset/geometry.hpp"
#include "changeset/posterior.hpp"
#include "changeset/priors.hpp"

namespace changeset {

/// Generators of ξ inside the closed region of a lower-layer mask.
[[nodiscard]] std::size_t jumps_in_region(const LayerMask& region, const UpperLayer& xi);

/// Z(B) = c0 |B \ ξ| − c1 |B ∩ ξ| + k0 + k1 L(B) for the region of a
/// lower-layer mask. Generators on the boundary of B count.
[[nodiscard]] double gain(const LayerMask& region, const UpperLayer& xi, const DetectionParams& params);
[[nodiscard]] double gain(const StoppingSet& rho, const UpperLayer& xi, const DetectionParams& params);

/// Gain of the closure of R \ ξ, computed in the continuum. Uses ξ, so it is
/// an upper bound for diagnostics and not a stopping set.
[[nodiscard]] double clairvoyant_gain(const UpperLayer& xi, const GridSpec& grid, const DetectionParams& params);

/// ∫_B V over the region of a lower-layer mask, each cell taking the mean of
/// its four corner values.
[[nodiscard]] double field_integral(const LayerMask& region, std::span<const double> values);

/// ∫_B λ_u 1{u ∉ ξ} du for the region of a lower-layer mask.
[[nodiscard]] double compensator_integral(const PriorModel& prior, const LayerMask& region, const UpperLayer& xi);

/// Recipe for a fresh Q estimator per replication.
struct EstimatorConfig {
  Estimator mode{Estimator::monte_carlo};
  int q_samples{4096};
  int quadrature_order{16};

  [[nodiscard]] QEstimator build(const PriorModel& prior, double r, std::uint64_t seed) const;
};

enum class DetectorKind { optimal, no_info, rectangle, clairvoyant, empty };

struct DetectorSpec {
  DetectorKind kind{DetectorKind::optimal};
  Point2 corner{};  // rectangle detectors only

  [[nodiscard]] static DetectorSpec optimal() { return {DetectorKind::optimal, {}}; }
  [[nodiscard]] static DetectorSpec no_info() { return {DetectorKind::no_info, {}}; }
  [[nodiscard]] static DetectorSpec rectangle(Point2 t) { return {DetectorKind::rectangle, t}; }
  [[nodiscard]] static DetectorSpec clairvoyant() { return {DetectorKind::clairvoyant, {}}; }
  [[nodiscard]] static DetectorSpec empty() { return {DetectorKind::empty, {}}; }

  [[nodiscard]] std::string name() const;
};

/// The no-information baseline, the empty set and nine rectangles A_t with t
/// on the 3 x 3 lattice of grid nodes at the quartiles of the window.
[[nodiscard]] std::vector<DetectorSpec> default_competitors(const GridSpec& grid);

struct MeanSe {
  double mean{0.0};
  double se{0.0};
};

/// Sample mean and standard error with pairwise summation.
[[nodiscard]] MeanSe mean_se(std::span<const double> samples);

struct DetectorSummary {
  std::string name;
  MeanSe gain;
  std::size_t reps{0};
};

/// detectors[first] − detectors[second] on the same replications.
struct PairedDifference {
  std::string first;
  std::string second;
  MeanSe diff;
};

struct GainReport {
  std::string prior;
  DetectionParams params;
  GridSpec grid{1.0, 1};
  std::uint64_t seed{0};
  std::size_t reps{0};
  std::vector<DetectorSummary> detectors;
  std::vector<PairedDifference> differences;  // detector 0 against each other
  std::vector<std::vector<double>> per_rep;   // [detector][replication]

  [[nodiscard]] const DetectorSummary& find(const std::string& name) const;
  [[nodiscard]] MeanSe difference(std::size_t first, std::size_t second) const;
};

/// Paired Monte Carlo: replication k draws ξ from stream (seed, k, "changeset"),
/// N from (seed, k, "observation") and Q layers from (seed, k, "q-layers"), and
/// every detector is scored on the same draw. Replications run in parallel;
/// results do not depend on the thread count.
[[nodiscard]] GainReport evaluate_detectors(std::span<const DetectorSpec> detectors, const PriorModel& prior,
                                            const DetectionParams& params, const GridSpec& grid,
                                            const EstimatorConfig& est, std::size_t reps, std::uint64_t seed);

[[nodiscard]] MeanSe expected_gain(const DetectorSpec& detector, const PriorModel& prior,
                                   const DetectionParams& params, const GridSpec& grid, const EstimatorConfig& est,
                                   std::size_t reps, std::uint64_t seed);

struct ProjectionReport {
  std::size_t reps{0};
  std::string detector;
  MeanSe gap;          // Z(B) − k0 − ∫_B V
  MeanSe martingale;   // L(B) − ∫_B λ 1{L = 0}
  std::vector<double> gaps;
  std::vector<double> martingales;

  [[nodiscard]] bool gap_pass() const noexcept { return std::abs(gap.mean) <= 3.0 * gap.se; }
  [[nodiscard]] bool martingale_pass() const noexcept { return std::abs(martingale.mean) <= 3.0 * martingale.se; }
  [[nodiscard]] bool pass() const noexcept { return gap_pass() && martingale_pass(); }
};

/// Checks E[Z(B)] = k0 + E[∫_B V] and E[L(B) − ∫_B λ 1{L=0}] = 0 for the
/// optimal stopping set or a fixed rectangle, on paired replications.
[[nodiscard]] ProjectionReport projection_identity_check(const PriorModel& prior, const DetectionParams& params,
                                                         const GridSpec& grid, const EstimatorConfig& est,
                                                         std::size_t reps, std::uint64_t seed,
                                                         const DetectorSpec& detector = DetectorSpec::optimal());

void write_gain_summary(std::ostream& out, const GainReport& report);
/// One row per replication, one column per detector.
void write_gain_csv(std::ostream& out, const GainReport& report);

}  // namespace changeset

#endif  // CHANGESET_GAIN_HPP
