#include "biome/config.hpp"

#include <cmath>

namespace biome {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid EnvConfig: " + what);
}

bool non_negative(const Nutrients& n) { return n.earth >= 0.0 && n.air >= 0.0; }

}  // namespace

void EnvConfig::validate() const {
  require(state_size >= 4, "state_size must be >= 4");
  require(max_nutrient_cell > 0.0, "max_nutrient_cell must be > 0");
  require(generator_amount >= 0.0, "generator_amount must be >= 0");
  // Four edges per cell; the symmetric flow form moves rate/2 of the
  // difference per edge, this bound keeps every sweep positivity preserving
  // with margin.
  require(diffusion_rate > 0.0 && diffusion_rate * 4.0 <= 1.0,
          "diffusion_rate must be in (0, 0.25]");
  require(diffusion_iterations_per_step >= 1, "diffusion_iterations_per_step must be >= 1");
  require(absorption_amount >= 0.0, "absorption_amount must be >= 0");
  for (double d : dissipation) require(d >= 0.0, "dissipation must be >= 0");
  require(non_negative(specialize_cost), "specialize_cost must be >= 0");
  require(non_negative(spawn_cost), "spawn_cost must be >= 0");
  require(non_negative(reproduce_cost), "reproduce_cost must be >= 0");
  require(seed_min_nutrient >= 0.0, "seed_min_nutrient must be >= 0");
  require(max_lifetime > 0, "max_lifetime must be > 0");
  require(aging_slope >= 0.0, "aging_slope must be >= 0");
  require(struct_decay_earth >= 0.0 && struct_decay_agent >= 0.0, "struct_decay must be >= 0");
  require(struct_generation >= 0.0, "struct_generation must be >= 0");
  require(structural_cap >= 0.0, "structural_cap must be >= 0");
  require(struct_iterations_per_step >= 0, "struct_iterations_per_step must be >= 0");
  require(max_reproduce_per_step >= 1, "max_reproduce_per_step must be >= 1");
  require(reproduce_min_dist >= 0 && reproduce_max_dist >= reproduce_min_dist,
          "reproduce distances must satisfy 0 <= min <= max");
  require(max_programs >= 1, "max_programs must be >= 1");
}

}  // namespace biome
