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

// Parallel row-sweep kernel against the serial node-by-node reference.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "changeset/posterior.hpp"
#include "changeset/process.hpp"

namespace {

using namespace changeset;

struct Setup {
  PriorModel prior = PriorModel::first_line_poisson(2.0);
  DetectionParams params{1.0, 3.0, 1.0, 1.0, 0.0, 1.0, 1.0};
  PointPattern points;
  Setup() {
    RandomStream rng(17);
    points = sample_pair(prior, params, rng).second;
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_FieldKernel(benchmark::State& state) {
  const Setup& s = setup();
  const GridSpec grid(1.0, static_cast<int>(state.range(0)));
  const QEstimator est = QEstimator::monte_carlo(s.prior, 1.0, static_cast<int>(state.range(1)), 5);
  omp_set_num_threads(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(v_field(s.points, s.prior, s.params, grid, est).values.data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.node_count()));
}

void BM_FieldReference(benchmark::State& state) {
  const Setup& s = setup();
  const GridSpec grid(1.0, static_cast<int>(state.range(0)));
  const QEstimator est = QEstimator::monte_carlo(s.prior, 1.0, static_cast<int>(state.range(1)), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(v_field_reference(s.points, s.prior, s.params, grid, est).values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.node_count()));
}

void BM_ExactField(benchmark::State& state) {
  const PriorModel prior = PriorModel::single_jump_exp(4.0);
  const DetectionParams params{1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 0.35};
  RandomStream rng(3);
  const PointPattern points = sample_pair(prior, params, rng).second;
  const GridSpec grid(params.r, static_cast<int>(state.range(0)));
  const QEstimator est = QEstimator::exact(16);
  for (auto _ : state) benchmark::DoNotOptimize(v_field(points, prior, params, grid, est).values.data());
}

}  // namespace

BENCHMARK(BM_FieldKernel)->Args({32, 1024, 1})->Args({64, 4096, 1})->Args({64, 4096, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldReference)->Args({32, 1024})->Args({64, 4096})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactField)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
