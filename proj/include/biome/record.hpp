#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "biome/agents.hpp"
#include "biome/kernels.hpp"
#include "biome/mutators.hpp"
#include "biome/physics.hpp"
#include "biome/presets.hpp"

namespace biome {

// Everything needed to re-run a simulation, plus what it produced.
struct RunRecord {
  Preset preset;
  AgentParams root_params;
  MutatorConfig mutator;
  std::uint64_t seed = 0;
  int steps = 0;
  int snapshot_every = 100;
  std::vector<StepStats> stats;
  // Serialized environment keyed by the number of completed steps.
  std::map<int, std::vector<std::uint8_t>> snapshots;
};

struct RecordOptions {
  Backend backend = Backend::Serial;
  // Frames collected for the filmstrip, every `frame_every` steps (0: none).
  int frame_every = 0;
};

// Runs the simulation described by the record's inputs and fills in stats
// and snapshots (step 0, every snapshot_every steps, and the last step).
RunRecord record_run(const Preset& preset, const AgentParams& root, const MutatorConfig& mutator, std::uint64_t seed,
                     int steps, int snapshot_every, Backend backend = Backend::Serial);

// Directory layout: record.json, root.params, stats.csv, snapshots/step_N.bin
void save_record(const std::filesystem::path& dir, const RunRecord& record);
RunRecord load_record(const std::filesystem::path& dir);

struct ReplayReport {
  int snapshots_checked = 0;
  std::vector<int> mismatched_steps;
  bool ok() const { return mismatched_steps.empty() && snapshots_checked > 0; }
};

// Re-simulates from the record's inputs and compares every stored snapshot
// byte for byte.
ReplayReport replay(const RunRecord& record, Backend backend = Backend::Serial);

}  // namespace biome
