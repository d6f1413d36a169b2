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

#ifndef CHANGESET_ORACLE_HPP
#define CHANGESET_ORACLE_HPP

// Brute-force reference computations. Nothing here uses the posterior
// engine: every estimate is built from prior draws and the likelihood of the
// observed points given a drawn change set.

#include <iosfwd>
#include <string>
#include <vector>

#include "changeset/geometry.hpp"
#include "changeset/priors.hpp"
#include "changeset/process.hpp"
#include "changeset/rng.hpp"

namespace changeset {

struct OracleEstimate {
  double estimate{0.0};
  double se{0.0};
  double ess{0.0};
  std::size_t samples{0};
  bool ess_warning{false};  // ESS < samples / 20
};

/// P(L_t = 0 | N on A_t) by self-normalised importance sampling from the
/// prior, with a delta-method standard error. Needs m >= 100.
[[nodiscard]] OracleEstimate is_posterior_oracle(const PointPattern& n, const PriorModel& prior, Point2 t,
                                                 const DetectionParams& params, int m, RandomStream& rng);

struct CompensatorVerdict {
  double mc_mean{0.0};
  double mc_se{0.0};
  double quadrature{0.0};
  bool pass{false};
};

/// E[L_t] by simulation against ∫_{A_t} λ_u P(L_u = 0) du by quadrature; pass
/// iff they agree within 3 standard errors. Needs reps >= 1000.
[[nodiscard]] CompensatorVerdict compensator_oracle(const PriorModel& prior, Point2 t, int reps, RandomStream& rng);

/// ∫_{A_t} λ_u P(L_u = 0) du by tensor Gauss–Legendre.
[[nodiscard]] double compensator_quadrature(const PriorModel& prior, Point2 t, int order = 32);

struct DiscreteBayesGrid {
  GridSpec nodes;                  // k x k cells, (k+1)^2 nodes
  std::vector<double> posterior;   // P(L_t = 0 | cell counts on A_t)
  std::vector<double> se;

  [[nodiscard]] double at(int i, int j) const { return posterior[nodes.index(i, j)]; }
};

/// Posterior on a k x k discretisation of the window: cell counts are Poisson
/// with intensity μ1 where the cell centre lies in ξ and μ0 elsewhere. Prior
/// change sets are sampled (m draws) and weighted by the exact discrete
/// likelihood. Needs 1 <= k <= 8.
[[nodiscard]] DiscreteBayesGrid discrete_bayes_oracle(const PointPattern& n, const PriorModel& prior, int k,
                                                      const DetectionParams& params, int m, RandomStream& rng);

/// "name.key = value" verdict lines.
void write_verdict(std::ostream& out, const std::string& name, double estimate, double se, double reference,
                   bool pass);

}  // namespace changeset

#endif  // CHANGESET_ORACLE_HPP
