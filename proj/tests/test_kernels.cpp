#include <doctest.h>

#include "biome/agents.hpp"
#include "biome/evolve.hpp"
#include "biome/kernels.hpp"
#include "biome/presets.hpp"
#include "biome/rng.hpp"

using namespace biome;

namespace {

Environment noisy_world(std::uint64_t seed, int h, int w) {
  Rng rng(seed);
  Environment env(h, w, 6);
  for (std::size_t i = 0; i < env.cell_count(); ++i) {
    env.set_type(i, static_cast<CellType>(rng.below(kNumCellTypes)));
    if (env.type(i) == CellType::OutOfBounds) env.set_type(i, CellType::Earth);
    for (double& v : env.state(i)) v = rng.uniform() * 10.0;
  }
  return env;
}

}  // namespace

TEST_CASE("backend names") {
  CHECK(parse_backend("serial") == Backend::Serial);
  CHECK(parse_backend("openmp") == Backend::OpenMP);
  CHECK(to_string(Backend::OpenMP) == "openmp");
  CHECK_THROWS(parse_backend("cuda"));
}

TEST_CASE("openmp kernels match the serial reference bit for bit") {
  const EnvConfig config;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto env = noisy_world(seed, 37, 53);
    std::vector<double> a(env.cell_count()), b(env.cell_count());
    structural_sweep(env, config, a, Backend::Serial);
    structural_sweep(env, config, b, Backend::OpenMP);
    CHECK(a == b);
    for (auto [ch, mat] : {std::pair{0, CellType::Earth}, std::pair{1, CellType::Air}}) {
      diffusion_sweep(env, ch, mat, 0.25, a, Backend::Serial);
      diffusion_sweep(env, ch, mat, 0.25, b, Backend::OpenMP);
      CHECK(a == b);
    }
  }
}

TEST_CASE("openmp simulation matches the serial one") {
  const auto preset = make_preset("persistence", 32, 48);
  auto serial = make_simulation(preset, init_minimal(), {}, 2, false, Backend::Serial);
  auto omp = make_simulation(preset, init_minimal(), {}, 2, false, Backend::OpenMP);
  for (int s = 0; s < 120; ++s) {
    serial.advance();
    omp.advance();
  }
  CHECK(serialize(serial.env()) == serialize(omp.env()));
  CHECK(serial.programs() == omp.programs());
}
