// Copyright 2026 The qnd Authors
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

#include <benchmark/benchmark.h>

#include "qnd/geometry_scan.hpp"
#include "qnd/mode_projection.hpp"
#include "qnd/squeezing_dynamics.hpp"

namespace {

struct Sphere {
  qnd::BeamParameters beam = qnd::beam_derived(0.852, 10.0);
  qnd::AtomicSpecies species = qnd::spin_half_species();
  qnd::CloudGeometry cloud = qnd::make_cloud(100.0, 100.0, 1.0);
};

void BM_ProjectionBuild(benchmark::State& state) {
  Sphere s;
  const auto basis = qnd::make_basis(static_cast<int>(state.range(0)));
  const auto grid = qnd::build_grid(s.cloud, 61);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qnd::projection_coefficients(basis, grid, s.beam));
  }
}
BENCHMARK(BM_ProjectionBuild)->Arg(4)->Arg(8)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_EffectiveNumbers(benchmark::State& state) {
  Sphere s;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qnd::effective_numbers(s.cloud, s.beam, s.species));
  }
}
BENCHMARK(BM_EffectiveNumbers)->Unit(benchmark::kMicrosecond);

void BM_CovarianceDerivative(benchmark::State& state) {
  Sphere s;
  qnd::DynamicsSettings settings;
  settings.p_max = static_cast<int>(state.range(0));
  const auto sys = qnd::build_system(s.cloud, s.beam, s.species, settings);
  const auto cfg = qnd::model_config(s.species, s.beam, settings);
  qnd::SpinWaveState<double> st;
  st.means = sys.initial_mean;
  st.covariances = sys.initial_covariance;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qnd::covariance_derivative(st, sys, cfg));
  }
  state.counters["dimension"] = sys.dimension();
}
BENCHMARK(BM_CovarianceDerivative)->Arg(4)->Arg(8)->Arg(15)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
