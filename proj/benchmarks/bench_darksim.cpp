// Copyright 2026 The darksim Authors
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

#include <random>

#include "darksim/dynamics.hpp"
#include "darksim/metrics.hpp"
#include "darksim/numlin.hpp"
#include "darksim/optctrl.hpp"
#include "darksim/pulses.hpp"
#include "darksim/spinsys.hpp"

using namespace darksim;

namespace {

const SpinParams kMolecule{270.3, 4.1};
const RelaxationModel kModel{0.0313634, 0.0480062, 0.0, 0.0};

void BM_HermitianExp(benchmark::State& state) {
    const Op h = internal_hamiltonian(kMolecule) + 7.0 * spin_operators().ix;
    for (auto _ : state) benchmark::DoNotOptimize(mat_exp_hermitian(h, kTwoPi * 50e-6));
}
BENCHMARK(BM_HermitianExp);

void BM_LindbladSliceExp(benchmark::State& state) {
    const Op h = internal_hamiltonian(kMolecule) + 7.0 * spin_operators().ix;
    for (auto _ : state) benchmark::DoNotOptimize(slice_superoperator(h, kModel, 50e-6));
}
BENCHMARK(BM_LindbladSliceExp);

void BM_TwoToneSegment(benchmark::State& state) {
    const auto method = static_cast<Method>(state.range(0));
    const Schedule sched = two_tone_schedule(resonant_two_tone(kMolecule, 7.0, 7.0), kMolecule, 50e-6);
    PropagationConfig cfg;
    cfg.method = method;
    for (auto _ : state) benchmark::DoNotOptimize(evolve_lindblad(singlet_deviation(), sched, kModel, cfg));
}
BENCHMARK(BM_TwoToneSegment)->Arg(static_cast<int>(Method::ExactSlice))->Arg(static_cast<int>(Method::Split))
    ->Unit(benchmark::kMillisecond);

void BM_NoisyTrajectories(benchmark::State& state) {
    const Schedule sched = two_tone_schedule(resonant_two_tone(kMolecule, 7.0, 7.0), kMolecule, 50e-6);
    NoiseProcess noise;
    noise.rms_amplitude = 1.5;
    noise.seed = 7;
    PropagationConfig cfg;
    cfg.method = Method::Split;
    cfg.n_trajectories = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_stochastic_avg(singlet_deviation(), sched, kModel, noise, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NoisyTrajectories)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PulseFidelity(benchmark::State& state) {
    const auto p = naive_two_tone();
    const auto spec = ObjectiveSpec::default_spec();
    for (auto _ : state) benchmark::DoNotOptimize(pulse_fidelity(p, 1.0, spec, kMolecule));
}
BENCHMARK(BM_PulseFidelity)->Unit(benchmark::kMicrosecond);

void BM_Spectrum(benchmark::State& state) {
    std::vector<cplx> fid = simulate_fid(equilibrium_deviation(), kMolecule, {}, 1e-3, 20000, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(spectrum_from_fid(fid, 1e-3, 131072, 0.5));
}
BENCHMARK(BM_Spectrum)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
