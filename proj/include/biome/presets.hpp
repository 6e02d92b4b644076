#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "biome/config.hpp"
#include "biome/environment.hpp"

namespace biome {

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kDefaultHeight = 72;
inline constexpr int kDefaultWidth = 128;
inline constexpr int kPetriHeight = 24;
inline constexpr int kPetriWidth = 32;

struct Preset {
  std::string name;
  EnvConfig config;
  EnvBlueprint blueprint;
  // Nutrients per cell of the initial seed.
  Nutrients seed_nutrients{};
  // Starting nutrient of every Earth (earth channel) and Air (air channel)
  // cell, so that worlds start scarce rather than empty.
  double initial_nutrient = 0.0;
};

std::vector<std::string> preset_names();

// Physics of a named configuration.
EnvConfig preset_config(std::string_view name);

// Layout of a named configuration at the given size: Sun along the top,
// Immovable along the bottom, Air over Earth, one seed column in the centre.
EnvBlueprint preset_blueprint(std::string_view name, int height, int width);

Preset make_preset(std::string_view name, int height = kDefaultHeight, int width = kDefaultWidth);

// Small single-seed world with the physics of `name`.
Preset make_petri(std::string_view name, int height = kPetriHeight, int width = kPetriWidth);

// new_environment, the initial nutrient fill, plus the seed at the first seed column with id `id`.
Environment seeded_environment(const Preset& preset, AgentId id = 1);

}  // namespace biome
