#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biome/config.hpp"
#include "biome/environment.hpp"
#include "biome/kernels.hpp"
#include "biome/mutators.hpp"
#include "biome/ops.hpp"
#include "biome/program_store.hpp"
#include "biome/rng.hpp"

namespace biome {

// Rows scanned bottom to top; a gravity-affected cell swaps with an
// intangible cell below it. Earth always falls, agents only with zero
// integrity.
Environment gravity_step(Environment env);

// One propagation sweep.
Environment structural_step(Environment env, const EnvConfig& config, Backend backend = Backend::Serial);
// struct_iterations_per_step sweeps.
Environment structural_update(Environment env, const EnvConfig& config, Backend backend = Backend::Serial);

Environment aging_step(Environment env);

// Energy substeps, exposed individually for testing.
Environment generate_nutrients(Environment env, const EnvConfig& config, NutrientLedger* ledger = nullptr);
Environment diffuse_nutrients(Environment env, const EnvConfig& config, Backend backend = Backend::Serial);
Environment harvest_nutrients(Environment env, const EnvConfig& config, NutrientLedger* ledger = nullptr);
// Returns the number of agents that died.
int dissipate(Environment& env, const EnvConfig& config, NutrientLedger* ledger = nullptr);

// Dissipation an agent of the given type and age pays per channel this step.
double dissipation_cost(const EnvConfig& config, CellType type, double age);

// generation -> diffusion -> harvest -> dissipation/death.
Environment energy_step(Environment env, const EnvConfig& config, NutrientLedger* ledger = nullptr,
                        int* deaths = nullptr, Backend backend = Backend::Serial);

struct StepOptions {
  Backend backend = Backend::Serial;
  MutatorConfig mutator{};
  // Petri mode: reproductions are counted but never place a seed.
  bool intercept = false;
};

struct StepStats {
  std::uint64_t step = 0;
  int n_agents = 0;
  int births = 0;  // spawned cells + 2 per placed seed
  int deaths = 0;  // starvation deaths + flowers consumed by reproduction
  int n_repro_success = 0;
  int n_repro_attempts = 0;
  ReproStats repro{};
  ExclusiveStats exclusive{};
  NutrientLedger ledger{};
};

std::string stats_csv_header();
std::string stats_csv_row(const StepStats& s);

struct StepResult {
  Environment env;
  ProgramStore programs;
  StepStats stats;
};

// One master step: agent parallel ops -> exclusive ops -> reproduction ->
// gravity -> structural integrity -> aging -> energy.
StepResult step(Environment env, ProgramStore programs, const EnvConfig& config, const StepRng& rng,
                const StepOptions& options = {});

// Convenience owner of a running world.
class Simulation {
 public:
  Simulation(Environment env, ProgramStore programs, EnvConfig config, std::uint64_t seed,
             StepOptions options = {});

  const StepStats& advance();

  const Environment& env() const { return env_; }
  const ProgramStore& programs() const { return programs_; }
  const EnvConfig& config() const { return config_; }
  std::uint64_t steps_done() const { return step_; }
  const StepStats& last_stats() const { return last_; }

 private:
  Environment env_;
  ProgramStore programs_;
  EnvConfig config_;
  std::uint64_t seed_;
  StepOptions options_;
  std::uint64_t step_ = 0;
  StepStats last_{};
};

}  // namespace biome
