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

#include "changeset/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "changeset/errors.hpp"
#include "changeset/format.hpp"

namespace changeset {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return value;
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
  return v;
}

int at_least(const std::string& key, int v, int lo) {
  if (v < lo) throw ConfigError(key + " must be at least " + std::to_string(lo));
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad value for " + key + ": '" + text + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "prior.kind") {
    (void)parse_prior_kind(value);
    prior_kind = value;
  } else if (key == "prior.gamma") {
    prior_gamma = positive(key, parse_number<double>(key, value));
  } else if (key == "prior.density_file") {
    prior_density_file = value;
  } else if (key == "obs.mu0") {
    mu0 = parse_number<double>(key, value);
  } else if (key == "obs.mu1") {
    mu1 = parse_number<double>(key, value);
  } else if (key == "gain.c0") {
    c0 = parse_number<double>(key, value);
  } else if (key == "gain.c1") {
    c1 = parse_number<double>(key, value);
  } else if (key == "gain.k0") {
    k0 = parse_number<double>(key, value);
  } else if (key == "gain.k1") {
    k1 = parse_number<double>(key, value);
  } else if (key == "region.r") {
    r = positive(key, parse_number<double>(key, value));
  } else if (key == "grid.n") {
    grid_n = at_least(key, parse_number<int>(key, value), 1);
  } else if (key == "mc.q_samples") {
    q_samples = at_least(key, parse_number<int>(key, value), 1);
  } else if (key == "mc.replications") {
    replications = at_least(key, parse_number<int>(key, value), 2);
  } else if (key == "mc.estimator") {
    if (value != "mc" && value != "exact") throw ConfigError("mc.estimator must be 'mc' or 'exact'");
    estimator = value;
  } else if (key == "quadrature.order") {
    quadrature_order = at_least(key, parse_number<int>(key, value), 1);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "mode") {
    if (value != "detect" && value != "support" && value != "evaluate" && value != "verify" && value != "sweep") {
      throw ConfigError("unknown mode '" + value + "'");
    }
    mode = value;
  } else if (key == "input.points") {
    input_points = value;
  } else if (key == "input.changeset") {
    input_changeset = value;
  } else if (key == "strict") {
    strict = parse_bool(key, value);
  } else if (key == "sweep.param") {
    static const char* const allowed[] = {"prior.gamma", "obs.mu0", "obs.mu1", "gain.c0", "gain.c1",
                                          "gain.k0",     "gain.k1", "region.r"};
    bool ok = false;
    for (const char* a : allowed) ok = ok || value == a;
    if (!ok) throw ConfigError("sweep.param cannot be '" + value + "'");
    sweep_param = value;
  } else if (key == "sweep.values") {
    sweep_values.clear();
    std::istringstream list(value);
    std::string item;
    while (std::getline(list, item, ',')) sweep_values.push_back(parse_number<double>(key, trim(item)));
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, std::filesystem::path base_dir) {
  ExperimentConfig config;
  config.base_dir = std::move(base_dir);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "prior.kind = " << c.prior_kind << '\n'
      << "prior.gamma = " << format_double(c.prior_gamma) << '\n';
  if (!c.prior_density_file.empty()) out << "prior.density_file = " << c.prior_density_file << '\n';
  out << "obs.mu0 = " << format_double(c.mu0) << '\n'
      << "obs.mu1 = " << format_double(c.mu1) << '\n'
      << "gain.c0 = " << format_double(c.c0) << '\n'
      << "gain.c1 = " << format_double(c.c1) << '\n'
      << "gain.k0 = " << format_double(c.k0) << '\n'
      << "gain.k1 = " << format_double(c.k1) << '\n'
      << "region.r = " << format_double(c.r) << '\n'
      << "grid.n = " << c.grid_n << '\n'
      << "mc.q_samples = " << c.q_samples << '\n'
      << "mc.replications = " << c.replications << '\n'
      << "mc.estimator = " << c.estimator << '\n'
      << "quadrature.order = " << c.quadrature_order << '\n'
      << "seed = " << c.seed << '\n'
      << "mode = " << c.mode << '\n';
  if (!c.input_points.empty()) out << "input.points = " << c.input_points << '\n';
  if (!c.input_changeset.empty()) out << "input.changeset = " << c.input_changeset << '\n';
  out << "strict = " << (c.strict ? "true" : "false") << '\n' << "sweep.param = " << c.sweep_param << '\n';
  if (!c.sweep_values.empty()) {
    out << "sweep.values = ";
    for (std::size_t k = 0; k < c.sweep_values.size(); ++k) {
      out << (k ? ", " : "") << format_double(c.sweep_values[k]);
    }
    out << '\n';
  }
}

std::filesystem::path resolve_path(const ExperimentConfig& config, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : config.base_dir / p;
}

PriorModel make_prior(const ExperimentConfig& config) {
  switch (parse_prior_kind(config.prior_kind)) {
    case PriorKind::single_jump_exp:
      return PriorModel::single_jump_exp(config.prior_gamma);
    case PriorKind::first_line_poisson:
      return PriorModel::first_line_poisson(config.prior_gamma);
    case PriorKind::single_jump_density: {
      if (config.prior_density_file.empty()) throw ConfigError("single_jump_density needs prior.density_file");
      const auto path = resolve_path(config, config.prior_density_file);
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open density file '" + path.string() + "'");
      return PriorModel::single_jump_density(read_density_csv(in, config.r));
    }
  }
  throw ConfigError("unknown prior kind");
}

DetectionParams make_params(const ExperimentConfig& config) {
  DetectionParams p;
  p.mu0 = config.mu0;
  p.mu1 = config.mu1;
  p.c0 = config.c0;
  p.c1 = config.c1;
  p.k0 = config.k0;
  p.k1 = config.k1;
  p.r = config.r;
  p.validate(config.mode == "support");
  return p;
}

GridSpec make_grid(const ExperimentConfig& config) { return GridSpec(config.r, config.grid_n); }

}  // namespace changeset
