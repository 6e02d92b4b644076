#pragma once

#include <string_view>
#include <vector>

#include "biome/agents.hpp"
#include "biome/rng.hpp"

namespace biome {

enum class MutatorKind { Basic, Adaptive };

std::string_view to_string(MutatorKind k);
MutatorKind parse_mutator_kind(std::string_view name);

struct MutatorConfig {
  MutatorKind kind = MutatorKind::Basic;
  double update_prob = 0.2;
  double base_sigma = 0.01;
  double meta_update_prob = 0.2;
  double meta_sigma = 0.1;

  void validate() const;
  friend bool operator==(const MutatorConfig&, const MutatorConfig&) = default;
};

inline constexpr double kMinAdaptiveSigma = 1e-6;
inline constexpr double kMaxAdaptiveSigma = 1.0;

// Program of one organism: agent-logic parameters plus the mutator's own
// state (per-parameter sigmas for the adaptive mutator, empty for basic).
struct ProgramEntry {
  AgentParams logic;
  std::vector<float> mutator_state;

  friend bool operator==(const ProgramEntry&, const ProgramEntry&) = default;
};

// Each coordinate is resampled around its value with probability
// update_prob; sigma is fixed.
std::vector<float> mutate_basic(std::vector<float> params, double sigma, Rng& rng,
                                double update_prob = 0.2);

// Operates on [params || sigmas]; length must be even.
std::vector<float> mutate_adaptive(std::vector<float> params_with_sigmas, Rng& rng,
                                   const MutatorConfig& config);

// Initial program for a lineage root under the given mutator.
ProgramEntry make_root_entry(AgentParams logic, const MutatorConfig& config);

// Child program: mutated logic and mutated mutator state. The parent is not
// modified. Only (parent, rng) flow in; no fitness information.
ProgramEntry spawn_child_params(const ProgramEntry& parent, const MutatorConfig& config, Rng& rng);

}  // namespace biome
