#include <benchmark/benchmark.h>

#include "spdcsim/crystal_optics.h"
#include "spdcsim/polarization_state.h"
#include "spdcsim/spectral_engine.h"
#include "spdcsim/tomography.h"

namespace {

spdcsim::CrystalSpec degenerate_crystal() {
  spdcsim::CrystalSpec crystal;
  crystal.temperature_c = spdcsim::degenerate_temperature(crystal, 0.405);
  return crystal;
}

void BM_ComputeJsa(benchmark::State& state) {
  const auto crystal = degenerate_crystal();
  spdcsim::SpectralGrid grid;
  grid.points_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spdcsim::compute_jsa(spdcsim::simulation_pump_preset(), crystal, grid));
  }
}
BENCHMARK(BM_ComputeJsa)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Schmidt(benchmark::State& state) {
  spdcsim::SpectralGrid grid;
  grid.points_per_axis = static_cast<int>(state.range(0));
  const auto jsa = spdcsim::compute_jsa(spdcsim::simulation_pump_preset(), degenerate_crystal(), grid);
  for (auto _ : state) benchmark::DoNotOptimize(spdcsim::schmidt_decomposition(jsa));
}
BENCHMARK(BM_Schmidt)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_MleReconstruct(benchmark::State& state) {
  const auto set = state.range(0) == 16 ? spdcsim::ProjectorSet::standard16()
                                        : spdcsim::ProjectorSet::full36();
  const auto rho = spdcsim::mix_with_white_noise(spdcsim::TwoQubitState::from_ket(spdcsim::psi_plus()), 0.95);
  const auto records = spdcsim::simulate_tomography(rho, set, {}, 7);
  const auto counts = spdcsim::counts_for(records, set, spdcsim::CountMode::kPoisson);
  for (auto _ : state) benchmark::DoNotOptimize(spdcsim::mle_reconstruct(counts, set));
}
BENCHMARK(BM_MleReconstruct)->Arg(16)->Arg(36)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
