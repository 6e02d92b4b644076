#include "biome/presets.hpp"

#include <algorithm>
#include <string>

namespace biome {

std::vector<std::string> preset_names() { return {"persistence", "collaboration", "sideways", "pestilence"}; }

EnvConfig preset_config(std::string_view name) {
  EnvConfig c;
  c.state_size = 6;
  c.max_nutrient_cell = 10.0;
  c.generator_amount = 0.05;
  c.diffusion_rate = 0.25;
  c.diffusion_iterations_per_step = 4;
  c.absorption_amount = 0.1;
  c.seed_min_nutrient = 0.2;
  c.max_reproduce_per_step = 2;
  c.reproduce_min_dist = 3;
  c.reproduce_max_dist = 10;
  c.max_programs = 256;

  if (name == "persistence" || name == "sideways") {
    c.dissipation = {0.005, 0.005, 0.005, 0.01};
    c.specialize_cost = {0.02, 0.02};
    c.spawn_cost = {0.5, 0.5};
    c.reproduce_cost = {1.0, 1.0};
    c.max_lifetime = 10000;
    c.aging_slope = 1e-4;
    return c;
  }
  if (name == "collaboration") {
    c.dissipation = {0.03, 0.03, 0.03, 0.04};
    c.specialize_cost = {0.2, 0.2};
    c.spawn_cost = {0.2, 0.2};
    c.reproduce_cost = {0.5, 0.5};
    c.max_lifetime = 100000000;
    c.aging_slope = 0.0;
    return c;
  }
  if (name == "pestilence") {
    c.dissipation = {0.01, 0.01, 0.01, 0.02};
    c.specialize_cost = {0.2, 0.2};
    c.spawn_cost = {0.2, 0.2};
    c.reproduce_cost = {0.5, 0.5};
    c.max_lifetime = 300;
    c.aging_slope = 1e-3;
    return c;
  }
  throw UnknownPreset("unknown preset '" + std::string(name) + "'");
}

EnvBlueprint preset_blueprint(std::string_view name, int height, int width) {
  preset_config(name);  // validates the name
  if (height < 8 || width < 8) throw EnvironmentError("preset worlds need at least 8x8 cells");
  EnvBlueprint b;
  b.height = height;
  b.width = width;
  const int earth_top = height / 2;
  const bool sideways = name == "sideways";
  for (int r = 0; r < height; ++r) {
    std::string row(width, r < earth_top ? 'a' : 'e');
    if (r == 0) {
      for (int c = 0; c < width; ++c)
        if (!sideways || c < width / 2) row[c] = 's';
    }
    if (r == height - 1) {
      for (int c = 0; c < width; ++c)
        if (!sideways || c >= width / 2) row[c] = '#';
    }
    b.rows.push_back(std::move(row));
  }
  b.seed_columns = {width / 2};
  return b;
}

Preset make_preset(std::string_view name, int height, int width) {
  Preset p;
  p.name = std::string(name);
  p.config = preset_config(name);
  p.blueprint = preset_blueprint(name, height, width);
  p.seed_nutrients = {2.5, 2.5};
  p.initial_nutrient = 2.0;
  return p;
}

Preset make_petri(std::string_view name, int height, int width) {
  Preset p = make_preset(name, height, width);
  p.name += "-petri";
  return p;
}

Environment seeded_environment(const Preset& preset, AgentId id) {
  Environment env = new_environment(preset.blueprint, preset.config);
  const double fill = std::min(preset.initial_nutrient, preset.config.max_nutrient_cell);
  for (std::size_t i = 0; i < env.cell_count(); ++i) {
    if (env.type(i) == CellType::Earth) env.value(i, kEarthNutrient) = fill;
    if (env.type(i) == CellType::Air) env.value(i, kAirNutrient) = fill;
  }
  if (preset.blueprint.seed_columns.empty()) return env;
  return place_seed(std::move(env), preset.blueprint.seed_columns.front(), id, preset.seed_nutrients);
}

}  // namespace biome
