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

// Batch front end: changeset <simulate|vfield|detect|evaluate|verify|sweep>
//   --config PATH [--out DIR] [--seed N] [--threads N]
//
// Outputs depend only on the configuration and seed. Errors are reported as a
// single line "error kind=<kind> message=<text>" on stderr.

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "changeset/config.hpp"
#include "changeset/detector.hpp"
#include "changeset/errors.hpp"
#include "changeset/format.hpp"
#include "changeset/gain.hpp"
#include "changeset/oracle.hpp"
#include "changeset/posterior.hpp"
#include "changeset/process.hpp"

namespace fs = std::filesystem;
using namespace changeset;

namespace {

constexpr int kExitError = 1;
constexpr int kExitVerdictFailed = 2;

struct TheoremConditionFailure : Error {
  explicit TheoremConditionFailure(const std::string& what) : Error("theorem-condition", what) {}
};

struct Run {
  ExperimentConfig config;
  fs::path out;
};

std::ofstream open_output(const Run& run, const std::string& name) {
  std::ofstream f(run.out / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + (run.out / name).string() + "'");
  return f;
}

void write_config_block(std::ostream& out, const ExperimentConfig& config) {
  out << "# resolved config\n";
  write_config(out, config);
  out << "# results\n";
}

// Observed points and, when known, the true change set.
struct Observation {
  PointPattern points;
  std::optional<UpperLayer> xi;
};

Observation simulate(const PriorModel& prior, const DetectionParams& params, std::uint64_t seed) {
  RandomStream xi_rng = RandomStream::derive(seed, 0, "changeset");
  RandomStream obs_rng = RandomStream::derive(seed, 0, "observation");
  UpperLayer xi = sample_changeset(prior, params.r, xi_rng);
  PointPattern n = sample_observation(xi, params, obs_rng);
  return {std::move(n), std::move(xi)};
}

std::vector<Point2> read_points_file(const ExperimentConfig& config, const std::string& name) {
  const fs::path path = resolve_path(config, name);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return read_points_csv(in);
}

Observation observe(const ExperimentConfig& config, const PriorModel& prior, const DetectionParams& params) {
  if (config.input_points.empty()) return simulate(prior, params, config.seed);
  Observation obs;
  obs.points.r = params.r;
  for (const Point2& p : read_points_file(config, config.input_points)) {
    if (p.t1 <= params.r && p.t2 <= params.r) obs.points.points.push_back(p);
  }
  if (!config.input_changeset.empty()) obs.xi = normalize(read_points_file(config, config.input_changeset));
  return obs;
}

EstimatorConfig estimator_config(const ExperimentConfig& config) {
  EstimatorConfig est;
  est.mode = config.estimator == "exact" ? Estimator::exact_quadrature : Estimator::monte_carlo;
  est.q_samples = config.q_samples;
  est.quadrature_order = config.quadrature_order;
  return est;
}

PosteriorField compute_field(const ExperimentConfig& config, const PriorModel& prior, const DetectionParams& params,
                             const PointPattern& n) {
  const GridSpec grid = make_grid(config);
  const QEstimator est = estimator_config(config).build(prior, params.r,
                                                        RandomStream::derive_seed(config.seed, 0, "q-layers"));
  return params.support_mode() ? v_field_support(n, prior, params, grid, est) : v_field(n, prior, params, grid, est);
}

ConditionReport conditions(const ExperimentConfig& config, const PriorModel& prior, const DetectionParams& params) {
  ConditionReport report = check_theorem_conditions(prior, make_grid(config), params);
  if (config.strict && !report.pass()) {
    std::ostringstream msg;
    msg << "monotonicity conditions fail (" << report.analytic_rule << ")";
    if (report.violation) {
      msg << "; " << report.violation->function << " at (" << format_double(report.violation->at.t1) << ","
          << format_double(report.violation->at.t2) << ")";
    }
    throw TheoremConditionFailure(msg.str());
  }
  return report;
}

void write_conditions(std::ostream& out, const ConditionReport& c) {
  out << "conditions.analytic = "
      << (c.analytic_applicable ? (c.analytic_pass ? "pass" : "fail") : "not-applicable") << '\n'
      << "conditions.analytic_rule = " << c.analytic_rule << '\n'
      << "conditions.numeric = " << (c.numeric_pass ? "pass" : "fail") << '\n';
  if (c.violation) {
    out << "conditions.violation = " << c.violation->function << " (" << format_double(c.violation->at.t1) << ","
        << format_double(c.violation->at.t2) << ") -> (" << format_double(c.violation->next.t1) << ","
        << format_double(c.violation->next.t2) << ")\n";
  }
}

void write_monotone(std::ostream& out, const MonotoneVerdict& m) {
  out << "monotone_check = " << (m.pass ? "pass" : "fail") << '\n';
  if (!m.pass) {
    out << "monotone_check.from = (" << format_double(m.from->t1) << "," << format_double(m.from->t2) << ")\n"
        << "monotone_check.to = (" << format_double(m.to->t1) << "," << format_double(m.to->t2) << ")\n";
  }
}

int cmd_simulate(const Run& run) {
  const PriorModel prior = make_prior(run.config);
  const DetectionParams params = make_params(run.config);
  const Observation obs = simulate(prior, params, run.config.seed);
  {
    auto f = open_output(run, "changeset.csv");
    write_points_csv(f, {obs.xi->generators().begin(), obs.xi->generators().end()});
  }
  {
    auto f = open_output(run, "points.csv");
    write_points_csv(f, obs.points.points);
  }
  auto meta = open_output(run, "simulate.txt");
  write_config_block(meta, run.config);
  meta << "generators = " << obs.xi->size() << '\n' << "points = " << obs.points.size() << '\n';
  return 0;
}

int cmd_vfield(const Run& run) {
  const PriorModel prior = make_prior(run.config);
  const DetectionParams params = make_params(run.config);
  const ConditionReport cond = conditions(run.config, prior, params);
  const Observation obs = observe(run.config, prior, params);
  const PosteriorField field = compute_field(run.config, prior, params, obs.points);
  {
    auto f = open_output(run, "field.csv");
    write_field_csv(f, field);
  }
  auto meta = open_output(run, "field.txt");
  write_config_block(meta, run.config);
  write_field_metadata(meta, field);
  write_conditions(meta, cond);
  write_monotone(meta, monotone_check(field));
  return 0;
}

struct DetectOutcome {
  std::size_t points{0};
  StoppingSet rho;
  ChangeEstimate xi_hat;
  MonotoneVerdict monotone;
  ConditionReport conditions;
  std::optional<double> gain;
};

DetectOutcome detect(const ExperimentConfig& config) {
  const PriorModel prior = make_prior(config);
  const DetectionParams params = make_params(config);
  ConditionReport cond = conditions(config, prior, params);
  const Observation obs = observe(config, prior, params);
  const PosteriorField field = compute_field(config, prior, params, obs.points);
  StoppingSet rho = stopping_set_from_field(field);
  ChangeEstimate xi_hat = estimate_changeset(rho);
  std::optional<double> z;
  if (obs.xi) z = gain(rho, *obs.xi, params);
  return {obs.points.size(), std::move(rho), std::move(xi_hat), monotone_check(field), std::move(cond), z};
}

int cmd_detect(const Run& run) {
  const DetectOutcome d = detect(run.config);
  const auto write_mask = [&](const std::string& stem, const LayerMask& mask) {
    auto csv = open_output(run, stem + ".csv");
    write_mask_csv(csv, mask);
    auto pgm = open_output(run, stem + ".pgm");
    write_mask_pgm(pgm, mask);
  };
  write_mask("rho_hat", d.rho.member);
  write_mask("xi_hat", d.xi_hat.member);
  auto s = open_output(run, "detect.txt");
  write_config_block(s, run.config);
  s << "source = " << d.rho.source << '\n'
    << "points = " << d.points << '\n'
    << "rho_hat.nodes = " << d.rho.member.count() << '\n'
    << "rho_hat.area = " << format_double(region_area(d.rho.member)) << '\n'
    << "xi_hat.nodes = " << d.xi_hat.member.count() << '\n';
  if (d.gain) s << "gain = " << format_double(*d.gain) << '\n';
  write_monotone(s, d.monotone);
  write_conditions(s, d.conditions);
  return 0;
}

int cmd_evaluate(const Run& run) {
  const PriorModel prior = make_prior(run.config);
  const DetectionParams params = make_params(run.config);
  const GridSpec grid = make_grid(run.config);
  (void)conditions(run.config, prior, params);
  std::vector<DetectorSpec> detectors{DetectorSpec::optimal()};
  for (const DetectorSpec& d : default_competitors(grid)) detectors.push_back(d);
  detectors.push_back(DetectorSpec::clairvoyant());
  const GainReport report =
      evaluate_detectors(detectors, prior, params, grid, estimator_config(run.config),
                         static_cast<std::size_t>(run.config.replications), run.config.seed);
  {
    auto f = open_output(run, "gain_reps.csv");
    write_gain_csv(f, report);
  }
  auto s = open_output(run, "gain.txt");
  write_config_block(s, run.config);
  write_gain_summary(s, report);
  return 0;
}

int cmd_verify(const Run& run) {
  const PriorModel prior = make_prior(run.config);
  const DetectionParams params = make_params(run.config);
  const Observation obs = observe(run.config, prior, params);
  const EstimatorConfig est_config = estimator_config(run.config);
  const QEstimator est =
      est_config.build(prior, params.r, RandomStream::derive_seed(run.config.seed, 0, "q-layers"));
  const int m = std::max(100, run.config.replications);

  auto out = open_output(run, "verify.txt");
  write_config_block(out, run.config);
  bool all = true;
  const double r = params.r;
  for (int b = 1; b <= 5; ++b) {
    for (int a = 1; a <= 5; ++a) {
      const Point2 t{a * r / 5.0, b * r / 5.0};
      const PosteriorValue engine = posterior_no_change(obs.points, prior, t, params, est);
      RandomStream rng = RandomStream::derive(run.config.seed, static_cast<std::uint64_t>(5 * (b - 1) + a - 1),
                                              "is-oracle");
      const OracleEstimate oracle = is_posterior_oracle(obs.points, prior, t, params, m, rng);
      const double se = std::hypot(engine.se, oracle.se);
      const bool pass = std::abs(engine.value - oracle.estimate) <= 3.0 * se;
      all = all && pass;
      const std::string name = "posterior(" + format_double(t.t1) + "," + format_double(t.t2) + ")";
      write_verdict(out, name, engine.value, se, oracle.estimate, pass);
      if (oracle.ess_warning) out << name << ".warning = effective sample size " << format_double(oracle.ess) << '\n';

      RandomStream crng = RandomStream::derive(run.config.seed, static_cast<std::uint64_t>(5 * (b - 1) + a - 1),
                                               "compensator");
      const CompensatorVerdict comp = compensator_oracle(prior, t, std::max(1000, m), crng);
      all = all && comp.pass;
      write_verdict(out, "compensator(" + format_double(t.t1) + "," + format_double(t.t2) + ")", comp.mc_mean,
                    comp.mc_se, comp.quadrature, comp.pass);
    }
  }
  const ConditionReport cond = check_theorem_conditions(prior, make_grid(run.config), params);
  write_conditions(out, cond);
  out << "overall = " << (all ? "pass" : "fail") << '\n';
  return all ? 0 : kExitVerdictFailed;
}

int cmd_sweep(const Run& run) {
  if (run.config.sweep_values.empty()) throw ConfigError("sweep needs sweep.values");
  auto out = open_output(run, "sweep.csv");
  out << run.config.sweep_param << ",points,rho_hat_nodes,rho_hat_area,xi_hat_nodes,monotone_check,conditions\n";
  for (const double value : run.config.sweep_values) {
    ExperimentConfig c = run.config;
    c.set(c.sweep_param, format_double(value));
    const DetectOutcome d = detect(c);
    out << format_double(value) << ',' << d.points << ',' << d.rho.member.count() << ','
        << format_double(region_area(d.rho.member)) << ',' << d.xi_hat.member.count() << ','
        << (d.monotone.pass ? "pass" : "fail") << ',' << (d.conditions.pass() ? "pass" : "fail") << '\n';
  }
  auto meta = open_output(run, "sweep.txt");
  write_config_block(meta, run.config);
  meta << "rows = " << run.config.sweep_values.size() << '\n';
  return 0;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential change-set detection for planar Poisson processes"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "draw a change set and observed points"},
      {"vfield", "compute the V field on the grid"},
      {"detect", "build the stopping set and change-set estimate"},
      {"evaluate", "paired Monte Carlo comparison of detectors"},
      {"verify", "compare the posterior engine with independent oracles"},
      {"sweep", "repeat detect over a parameter list"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides the configured seed");
    sub->add_option("--threads", threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);
    Run run{load_config(config_path), fs::path(out_dir)};
    if (seed) run.config.seed = *seed;
    fs::create_directories(run.out);

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "simulate") return cmd_simulate(run);
    if (command == "vfield") return cmd_vfield(run);
    if (command == "detect") return cmd_detect(run);
    if (command == "evaluate") return cmd_evaluate(run);
    if (command == "verify") return cmd_verify(run);
    return cmd_sweep(run);
  } catch (const Error& e) {
    std::cerr << "error kind=" << e.kind() << " message=" << one_line(e.what()) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error kind=internal message=" << one_line(e.what()) << '\n';
  }
  return kExitError;
}
