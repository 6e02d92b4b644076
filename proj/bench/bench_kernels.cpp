#include <benchmark/benchmark.h>

#include "biome/agents.hpp"
#include "biome/evolve.hpp"
#include "biome/kernels.hpp"
#include "biome/physics.hpp"
#include "biome/presets.hpp"

using namespace biome;

namespace {

// A grown world: the default preset after some steps of the init logic.
const Environment& grown_world() {
  static const Environment env = [] {
    auto sim = make_simulation(make_preset("persistence"), init_minimal(), {}, 1);
    for (int i = 0; i < 300; ++i) sim.advance();
    return sim.env();
  }();
  return env;
}

Backend backend_of(const benchmark::State& state) { return state.range(0) ? Backend::OpenMP : Backend::Serial; }

void BM_StructuralSweep(benchmark::State& state) {
  const auto& env = grown_world();
  const EnvConfig config;
  std::vector<double> out(env.cell_count());
  for (auto _ : state) {
    structural_sweep(env, config, out, backend_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(std::string(to_string(backend_of(state))));
}

void BM_DiffusionSweep(benchmark::State& state) {
  const auto& env = grown_world();
  std::vector<double> out(env.cell_count());
  for (auto _ : state) {
    diffusion_sweep(env, kEarthNutrient, CellType::Earth, 0.25, out, backend_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(std::string(to_string(backend_of(state))));
}

void BM_Step(benchmark::State& state) {
  const auto preset = make_preset("persistence");
  auto programs = ProgramStore(preset.config.max_programs);
  programs.insert(make_root_entry(init_minimal(), {}));
  const auto& env = grown_world();
  // Programs for every id in the grown world.
  for (AgentId id : distinct_agent_ids(env))
    while (!programs.contains(id) && programs.next_id() <= id) programs.insert(make_root_entry(init_minimal(), {}));
  const StepOptions options{.backend = backend_of(state)};
  std::uint64_t s = 0;
  for (auto _ : state) {
    auto result = step(env, programs, preset.config, StepRng{1, s++}, options);
    benchmark::DoNotOptimize(result.stats.n_agents);
  }
  state.SetLabel(std::string(to_string(backend_of(state))));
}

}  // namespace

BENCHMARK(BM_StructuralSweep)->Arg(0)->Arg(1);
BENCHMARK(BM_DiffusionSweep)->Arg(0)->Arg(1);
BENCHMARK(BM_Step)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
