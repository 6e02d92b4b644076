#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "biome/cell_type.hpp"

namespace biome {

// Pair of nutrient amounts, one per channel.
struct Nutrients {
  double earth = 0.0;
  double air = 0.0;

  friend bool operator==(const Nutrients&, const Nutrients&) = default;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The laws of physics of a world.
struct EnvConfig {
  // 4 fixed channels (earth, air, age, integrity) plus internal channels.
  int state_size = 6;

  double max_nutrient_cell = 10.0;
  double generator_amount = 0.05;
  double diffusion_rate = 0.25;
  // Repeated diffusion sweeps per step; each sweep is conservative on its own.
  int diffusion_iterations_per_step = 1;
  double absorption_amount = 0.1;

  // Indexed by specialization: Unspecialized, Root, Leaf, Flower.
  std::array<double, kNumSpecializations> dissipation{0.01, 0.01, 0.01, 0.02};

  Nutrients specialize_cost{0.02, 0.02};
  Nutrients spawn_cost{0.5, 0.5};
  Nutrients reproduce_cost{1.0, 1.0};
  double seed_min_nutrient = 0.2;

  int max_lifetime = 10000;
  double aging_slope = 0.0;

  double struct_decay_earth = 1.0;
  double struct_decay_agent = 5.0;
  double struct_generation = 100.0;
  double structural_cap = 100.0;
  int struct_iterations_per_step = 5;

  int max_reproduce_per_step = 2;
  // Seeds land in a random column this many columns away from the flower.
  int reproduce_min_dist = 0;
  int reproduce_max_dist = 1;
  int max_programs = 256;

  // When false, offspring reuse the parent's program and no table slot is
  // consumed.
  bool reproduction_variation = true;
  // Same-organism mask in perception.
  bool perceive_agent_ids = true;

  int internal_channels() const { return state_size - 4; }

  // Throws ConfigError with a description of the first violated constraint.
  void validate() const;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

}  // namespace biome
