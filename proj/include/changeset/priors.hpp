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

#ifndef CHANGESET_PRIORS_HPP
#define CHANGESET_PRIORS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "changeset/geometry.hpp"
#include "changeset/rng.hpp"

namespace changeset {

enum class PriorKind { single_jump_exp, single_jump_density, first_line_poisson };

[[nodiscard]] std::string to_string(PriorKind kind);
[[nodiscard]] PriorKind parse_prior_kind(const std::string& text);

/// Piecewise-constant density of a single jump, one value per table cell.
///
/// Values are cell-midpoint densities; integrals use the midpoint rule on
/// the table's own grid, so F is exact for the tabulated function. Mass
/// beyond the table window is allowed and lands outside the detection window.
class DensityTable {
 public:
  DensityTable(GridSpec grid, std::vector<double> cell_values);

  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] double cell(int a, int b) const noexcept {
    return values_[static_cast<std::size_t>(b) * static_cast<std::size_t>(grid_.n()) + static_cast<std::size_t>(a)];
  }
  [[nodiscard]] double density(Point2 y) const noexcept;
  [[nodiscard]] double cdf(Point2 t) const noexcept;
  [[nodiscard]] double total_mass() const noexcept { return total_; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
  double total_{0.0};
};

/// Reads a density table: n rows of n comma-separated cell values, first
/// row at the bottom (smallest second coordinate).
[[nodiscard]] DensityTable read_density_csv(std::istream& in, double r);

class PriorModel {
 public:
  [[nodiscard]] static PriorModel single_jump_exp(double gamma);
  [[nodiscard]] static PriorModel first_line_poisson(double gamma);
  [[nodiscard]] static PriorModel single_jump_density(DensityTable table);

  [[nodiscard]] PriorKind kind() const noexcept { return kind_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] const std::optional<DensityTable>& density_table() const noexcept { return table_; }
  [[nodiscard]] bool is_single_jump() const noexcept { return kind_ != PriorKind::first_line_poisson; }
  [[nodiscard]] std::string describe() const;

 private:
  PriorModel(PriorKind kind, double gamma, std::optional<DensityTable> table)
      : kind_(kind), gamma_(gamma), table_(std::move(table)) {}

  PriorKind kind_;
  double gamma_;
  std::optional<DensityTable> table_;
};

struct DetectionParams {
  double mu0{1.0};
  double mu1{2.0};
  double c0{1.0};
  double c1{1.0};
  double k0{0.0};
  double k1{0.0};
  double r{1.0};

  [[nodiscard]] bool support_mode() const noexcept { return mu0 == 0.0; }
  /// Intensity jump μ1 − μ0.
  [[nodiscard]] double jump() const noexcept { return mu1 - mu0; }

  /// \throws InvalidArgument on any violated constraint. With
  /// `allow_support` the pair μ0 = 0 < μ1 is accepted.
  void validate(bool allow_support = false) const;
};

[[nodiscard]] UpperLayer sample_changeset(const PriorModel& prior, double r, RandomStream& rng);

/// λ_t. \throws DegenerateHazard where 1 − F_t <= 1e-12 for a tabulated density.
[[nodiscard]] double weak_hazard(const PriorModel& prior, Point2 t);

[[nodiscard]] double log_prob_no_jump(const PriorModel& prior, Point2 t);
[[nodiscard]] double prob_no_jump(const PriorModel& prior, Point2 t);

/// log q_t; +inf exactly when P(L_t = 0) = 0.
[[nodiscard]] double log_q_factor(const PriorModel& prior, Point2 t, const DetectionParams& params);
[[nodiscard]] double q_factor(const PriorModel& prior, Point2 t, const DetectionParams& params);

struct MonotonicityViolation {
  std::string function;  // "lambda" or "q"
  Point2 at;
  Point2 next;
  double value_at{0.0};
  double value_next{0.0};
};

struct ConditionReport {
  bool analytic_applicable{false};
  bool analytic_pass{false};
  std::string analytic_rule;
  bool numeric_pass{true};
  std::optional<MonotonicityViolation> violation;

  [[nodiscard]] bool pass() const noexcept { return numeric_pass && (!analytic_applicable || analytic_pass); }
};

/// Relative slack allowed by the numeric sweep before a decrease (increase)
/// between adjacent nodes counts as a violation.
inline constexpr double kSweepTolerance = 1e-12;

[[nodiscard]] ConditionReport check_theorem_conditions(const PriorModel& prior, const GridSpec& grid,
                                                       const DetectionParams& params);

}  // namespace changeset

#endif  // CHANGESET_PRIORS_HPP
