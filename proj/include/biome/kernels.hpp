#pragma once

#include <span>
#include <string_view>

#include "biome/config.hpp"
#include "biome/environment.hpp"

namespace biome {

// Serial is the reference; OpenMP must produce bit-identical output.
enum class Backend { Serial, OpenMP };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

// Integrity a cell would have after one propagation sweep, given the current
// integrity of its 3x3 neighbourhood.
double structural_cell(const Environment& env, const EnvConfig& config, int row, int col);

// One Jacobi sweep of structural propagation; `out` receives the new
// integrity of every cell.
void structural_sweep(const Environment& env, const EnvConfig& config, std::span<double> out,
                      Backend backend);

// New value of one nutrient channel after one diffusion sweep restricted to
// cells of `material`.
double diffusion_cell(const Environment& env, int channel, CellType material, double rate, int row,
                      int col);

// One Jacobi diffusion sweep: every edge between two 4-adjacent cells of
// `material` carries rate * (difference) / 2.
void diffusion_sweep(const Environment& env, int channel, CellType material, double rate,
                     std::span<double> out, Backend backend);

}  // namespace biome
