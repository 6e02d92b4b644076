#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "biome/agents.hpp"
#include "biome/kernels.hpp"
#include "biome/mutators.hpp"
#include "biome/physics.hpp"
#include "biome/presets.hpp"
#include "biome/rng.hpp"

namespace biome {

// ------------------------------------------------------------- evaluation

struct ReplicaResult {
  long long total_agents = 0;  // sum over steps of the agent count after the step
  bool extinct = false;
  int final_agents = 0;
};

struct EvalReport {
  std::vector<ReplicaResult> replicas;
  double mean_total = 0.0;
  double std_total = 0.0;
  int extinctions = 0;

  double extinction_rate() const {
    return replicas.empty() ? 0.0 : static_cast<double>(extinctions) / replicas.size();
  }
};

EvalReport summarize(std::vector<ReplicaResult> replicas);

struct EvalOptions {
  int reps = 16;
  int steps = 1000;
  std::uint64_t seed = 0;
  MutatorConfig mutator{};
  Backend backend = Backend::Serial;
  // Run replicas on separate threads.
  bool parallel_replicas = true;
};

// Seed of replica `rep` for a base seed.
std::uint64_t replica_seed(std::uint64_t seed, int rep);

// World of `preset` with one seed running `params` under `mutator`.
Simulation make_simulation(const Preset& preset, const AgentParams& params, const MutatorConfig& mutator,
                           std::uint64_t seed, bool intercept = false, Backend backend = Backend::Serial);

using StepObserver = std::function<void(const Simulation&)>;

// One replica; stops early once extinct (the remaining steps add nothing).
ReplicaResult run_replica(const Preset& preset, const AgentParams& params, const MutatorConfig& mutator, int steps,
                          std::uint64_t seed, Backend backend = Backend::Serial, const StepObserver& observer = {});

EvalReport evaluate(const Preset& preset, const AgentParams& params, const EvalOptions& options);

inline constexpr double kDeathPenalty = 1e6;

// a - e * death_penalty
double fitness(double total_agents, bool extinct, double death_penalty = kDeathPenalty);

// ------------------------------------------------------------------- PGPE

struct PgpeConfig {
  int population = 32;  // must be even: samples come in mirrored pairs
  double center_lr = 0.05;
  double std_lr = 0.1;
  double init_std = 0.02;
  double max_std_change = 0.2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct PgpeState {
  std::vector<double> center;
  std::vector<double> stdev;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  int steps = 0;
};

PgpeState pgpe_init(std::vector<double> center, const PgpeConfig& config);

struct PgpeSamples {
  std::vector<std::vector<double>> noise;   // population / 2
  std::vector<std::vector<double>> params;  // [2i] = center + noise[i], [2i+1] = center - noise[i]
};

PgpeSamples pgpe_ask(const PgpeState& state, const PgpeConfig& config, Rng& rng);

// Ranks mapped onto [-0.5, 0.5]; tied values share their average rank.
std::vector<double> centered_ranks(std::span<const double> values);

// Symmetric-sampling gradient on rank-shaped fitness; Adam on the centre,
// bounded relative steps on the deviations. Maximises fitness.
PgpeState pgpe_step(PgpeState state, std::span<const double> fitnesses, const PgpeSamples& samples,
                    const PgpeConfig& config);

// ---------------------------------------------------------------- petri

struct PetriResult {
  int n_repro = 0;
  std::vector<int> trace;  // agent count after each step
  int max_distinct_ids = 0;
  std::optional<int> first_selection_step;
};

PetriResult petri_run(const AgentParams& params, const Preset& petri, int n_steps = 300, std::uint64_t seed = 0,
                      const MutatorConfig& mutator = {}, bool intercept = true);

inline constexpr int kPetriTarget = 50;
// One reproduction is worth as much as being off target by 100 agent-steps.
inline constexpr double kPetriLambda = 100.0;

// -sum_t |count_t - target| + lambda * n_repro
double petri_fitness(std::span<const int> trace, int n_repro, int target = kPetriTarget,
                     double lambda = kPetriLambda);

// ---------------------------------------------------------- meta-evolution

struct MetaLogEntry {
  int outer_step = 0;
  double best_fitness = 0.0;     // best of this generation
  double best_so_far = 0.0;      // best seen, including the initial parameters
  double mean_fitness = 0.0;
  double wall_time = 0.0;        // seconds since start
};

struct MetaOptions {
  int outer_steps = 30;
  std::uint64_t seed = 0;
  // Larger steps than the PGPE defaults: 30 generations is a short budget.
  PgpeConfig pgpe{.population = 32, .center_lr = 0.1, .std_lr = 0.1, .init_std = 0.05};
  MutatorConfig mutator{};
  // End-to-end: steps of each inner run.
  int inner_steps = 1000;
  // Petri: steps, target size, reproduction bonus and runs per candidate.
  int petri_steps = 300;
  int petri_target = kPetriTarget;
  double petri_lambda = kPetriLambda;
  int petri_runs = 2;
  bool parallel = true;
  // Evaluate every generation on the same seeds, so fitnesses (and best-so-far) compare across
  // generations. Off: a fresh seed per generation.
  bool common_seeds = true;
  // Optional JSON-lines log and periodic checkpoints.
  std::optional<std::filesystem::path> out_dir{};
  int checkpoint_every = 10;
  std::function<void(const MetaLogEntry&)> on_step{};
};

struct MetaResult {
  AgentParams best;
  double best_fitness = 0.0;
  std::vector<MetaLogEntry> log;
};

MetaResult meta_evolve_e2e(const Preset& preset, const AgentParams& init, const MetaOptions& options);
MetaResult meta_evolve_petri(const Preset& petri, const AgentParams& init, const MetaOptions& options);

// Fitness of one candidate under each meta-evolution mode.
double e2e_candidate_fitness(const Preset& preset, const AgentParams& params, const MetaOptions& options,
                             std::uint64_t seed);
double petri_candidate_fitness(const Preset& petri, const AgentParams& params, const MetaOptions& options,
                               std::uint64_t seed);

}  // namespace biome
