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

#include <sstream>

#include "changeset/config.hpp"
#include "changeset/errors.hpp"

using namespace changeset;

TEST_CASE("parse a config with comments") {
  std::istringstream in(
      "# standard scenario\n"
      "prior.kind = single_jump_exp\n"
      "prior.gamma = 4   # trailing comment\n"
      "\n"
      "obs.mu0 = 1\n"
      "obs.mu1 = 2\n"
      "region.r = 0.25\n"
      "grid.n = 16\n"
      "mc.estimator = exact\n"
      "seed = 99\n"
      "sweep.values = 1, 2, 4\n");
  const ExperimentConfig c = parse_config(in, "/data");
  CHECK(c.prior_kind == "single_jump_exp");
  CHECK(c.prior_gamma == 4.0);
  CHECK(c.mu1 == 2.0);
  CHECK(c.grid_n == 16);
  CHECK(c.seed == 99);
  CHECK(c.sweep_values == std::vector<double>{1, 2, 4});
  CHECK(make_prior(c).kind() == PriorKind::single_jump_exp);
  CHECK(make_grid(c).r() == 0.25);
  CHECK(make_params(c).jump() == 1.0);
  CHECK(resolve_path(c, "pts.csv") == std::filesystem::path("/data/pts.csv"));
}

TEST_CASE("bad input is rejected") {
  std::istringstream unknown("prior.shape = 2\n");
  CHECK_THROWS_AS((void)parse_config(unknown), ConfigError);
  std::istringstream junk("grid.n = many\n");
  CHECK_THROWS_AS((void)parse_config(junk), ConfigError);
  std::istringstream no_equals("grid.n 4\n");
  CHECK_THROWS_AS((void)parse_config(no_equals), ConfigError);
  std::istringstream equal_rates("obs.mu0 = 2\nobs.mu1 = 2\n");
  const ExperimentConfig c = parse_config(equal_rates);
  CHECK_THROWS_AS((void)make_params(c), InvalidArgument);

  ExperimentConfig support;
  support.mu0 = 0.0;
  CHECK_THROWS_AS((void)make_params(support), InvalidArgument);
  support.mode = "support";
  CHECK(make_params(support).support_mode());
}

TEST_CASE("written configs parse back to the same values") {
  ExperimentConfig c;
  c.prior_gamma = 1.0 / 3.0;
  c.mu1 = 2.75;
  c.grid_n = 33;
  c.strict = true;
  c.sweep_values = {0.5, 1.5};
  std::stringstream s;
  write_config(s, c);
  const ExperimentConfig back = parse_config(s);
  std::ostringstream again;
  write_config(again, back);
  CHECK(again.str() == s.str());
  CHECK(back.prior_gamma == c.prior_gamma);
  CHECK(back.strict);
}
