#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "biome/agents.hpp"
#include "biome/environment.hpp"
#include "biome/mutators.hpp"
#include "biome/program_store.hpp"
#include "biome/rng.hpp"

namespace biome {

// Per-channel nutrient bookkeeping. Every change of the grid total is
// attributed to exactly one of these terms.
struct ChannelLedger {
  double generated = 0.0;
  double dissipated = 0.0;
  double op_costs = 0.0;
  double destroyed = 0.0;  // death, displacement by spawn/seeds, unplaced seeds
  double cap_lost = 0.0;

  double net() const { return generated - dissipated - op_costs - destroyed - cap_lost; }
  ChannelLedger& operator+=(const ChannelLedger& o);
};

struct NutrientLedger {
  std::array<ChannelLedger, 2> channel{};
  NutrientLedger& operator+=(const NutrientLedger& o);
};

// Sum of one nutrient channel over the whole grid.
double total_nutrient(const Environment& env, int channel);

// ---------------------------------------------------------------- parallel

struct ParallelOp {
  std::size_t actor = 0;
  std::optional<CellType> specialize;
  Nutrients cost{};
  // Gift per neighbour direction (kNeighborOffsets order).
  std::array<Nutrients, 8> gifts{};
  std::vector<double> internal;  // empty: unchanged
};

// Clamps untrusted requests into a valid op: specialisation only if payable,
// gifts non-negative, only to agent cells and never more than what is left
// after the specialisation cost. Internal state passes through.
ParallelOp sanitize_parallel(const ParallelInterface& interface, const Perception& perception,
                             std::size_t actor, const EnvConfig& config);

// Applies all ops simultaneously. Incoming gifts are summed in a fixed
// neighbour order per recipient, so the result does not depend on the order
// of `ops`. Each actor may appear at most once.
Environment apply_parallel(Environment env, std::span<const ParallelOp> ops, const EnvConfig& config,
                           NutrientLedger* ledger = nullptr);

// --------------------------------------------------------------- exclusive

struct CellValue {
  CellType type = CellType::Void;
  std::vector<double> state;
  AgentId id = kNullAgent;

  friend bool operator==(const CellValue&, const CellValue&) = default;
};

CellValue read_cell(const Environment& env, std::size_t idx);
void write_cell(Environment& env, std::size_t idx, const CellValue& value);

enum class ExclusiveKind { AirSpread, EarthSlide, Spawn };

struct ExclusiveOp {
  ExclusiveKind kind = ExclusiveKind::AirSpread;
  std::size_t actor = 0;
  std::size_t target = 0;
  CellValue new_target;
  CellValue new_actor;
  Nutrients cost{};
};

// Air fills one uniformly chosen neighbouring Void.
std::vector<ExclusiveOp> propose_air(const Environment& env, const StepRng& rng);
// Supported Earth with a free side and a free diagonal below slides sideways.
std::vector<ExclusiveOp> propose_earth(const Environment& env, const StepRng& rng);

// Converts one agent's spawn wish into an op, or nothing if the coin flip says
// no, the sampled target is not Void/Air/Earth, or the cost is unaffordable.
std::optional<ExclusiveOp> sanitize_spawn(const ExclusiveInterface& interface, const Environment& env,
                                          std::size_t actor, const EnvConfig& config, Rng& rng);

struct SpawnRequest {
  std::size_t actor = 0;
  ExclusiveInterface interface;
};

std::vector<ExclusiveOp> propose_spawn(std::span<const SpawnRequest> requests, const Environment& env,
                                       const EnvConfig& config, const StepRng& rng);

struct ExclusiveStats {
  int proposed = 0;
  int committed = 0;
  int spawned = 0;
};

// One uniformly random winner per target cell. A winner whose actor cell is
// the target of another winner is dropped entirely, so every cell is written
// by at most one op. `write_log`, when given, receives every written index.
Environment resolve_exclusive(Environment env, std::span<const ExclusiveOp> ops, const StepRng& rng,
                              NutrientLedger* ledger = nullptr, ExclusiveStats* stats = nullptr,
                              std::vector<std::size_t>* write_log = nullptr);

// Winner index (into `candidates`) for a contested target. Exposed for tests.
std::size_t pick_winner(std::size_t target, std::size_t candidates, const StepRng& rng);

// --------------------------------------------------------------- reproduce

struct ReproduceOp {
  std::size_t flower = 0;
  Nutrients remaining{};  // after reproduce_cost
  AgentId parent = kNullAgent;
};

struct ReproStats {
  int attempts = 0;
  int selected = 0;
  int placed = 0;
  int failed_no_ground = 0;
  int failed_table_full = 0;
  // Intercepted reproductions whose seed would have had enough nutrients.
  int intercepted_success = 0;

  ReproStats& operator+=(const ReproStats& o);
};

// Valid only for flowers that can pay reproduce_cost.
std::optional<ReproduceOp> sanitize_reproduce(const ReproduceInterface& interface, const Environment& env,
                                              std::size_t idx, const EnvConfig& config);

// Number of Air cells around a position; the selection weight of a flower.
int adjacent_air(const Environment& env, std::size_t idx);

struct ReproduceResult {
  Environment env;
  ProgramStore programs;
  ReproStats stats;
  std::vector<std::size_t> selected;  // flower indices in selection order
  std::vector<AgentId> new_ids;
};

// Selects up to max_reproduce_per_step flowers (weighted by adjacent Air,
// without replacement), deletes them and tries to place a mutated seed next
// to each. With `intercept`, no seed is placed; a selection counts as a
// success when the would-be seed holds at least seed_min_nutrient per channel.
ReproduceResult reproduce_pipeline(Environment env, std::span<const ReproduceOp> ops, ProgramStore programs,
                                   const MutatorConfig& mutator, const StepRng& rng, const EnvConfig& config,
                                   bool intercept = false, NutrientLedger* ledger = nullptr);

}  // namespace biome
