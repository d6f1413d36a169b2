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

#ifndef CHANGESET_CONFIG_HPP
#define CHANGESET_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "changeset/geometry.hpp"
#include "changeset/priors.hpp"

namespace changeset {

/// Experiment description read from flat "key = value" lines. Blank lines and
/// text after '#' are ignored; unknown keys are an error. Relative file paths
/// are resolved against `base_dir`.
struct ExperimentConfig {
  std::string prior_kind{"first_line_poisson"};
  double prior_gamma{2.0};
  std::string prior_density_file;
  double mu0{1.0};
  double mu1{3.0};
  double c0{1.0};
  double c1{1.0};
  double k0{0.0};
  double k1{1.0};
  double r{1.0};
  int grid_n{64};
  int q_samples{4096};
  int replications{10000};
  std::string estimator{"mc"};  // "mc" or "exact"
  int quadrature_order{16};
  std::uint64_t seed{1};
  std::string mode{"detect"};   // detect | support | evaluate | verify | sweep
  std::string input_points;     // optional observed points CSV
  std::string input_changeset;  // optional change-set generators CSV
  bool strict{false};           // theorem conditions must hold
  std::string sweep_param{"prior.gamma"};
  std::vector<double> sweep_values;
  std::filesystem::path base_dir{"."};

  /// Applies one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
};

[[nodiscard]] ExperimentConfig parse_config(std::istream& in, std::filesystem::path base_dir = ".");
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in a fixed order; parse_config reads it
/// back to an equal configuration.
void write_config(std::ostream& out, const ExperimentConfig& config);

[[nodiscard]] PriorModel make_prior(const ExperimentConfig& config);
[[nodiscard]] DetectionParams make_params(const ExperimentConfig& config);
[[nodiscard]] GridSpec make_grid(const ExperimentConfig& config);

/// Resolves a path from the configuration against its base directory.
[[nodiscard]] std::filesystem::path resolve_path(const ExperimentConfig& config, const std::string& path);

}  // namespace changeset

#endif  // CHANGESET_CONFIG_HPP
