#include "biome/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace biome {

std::string_view to_string(Backend b) { return b == Backend::OpenMP ? "openmp" : "serial"; }

Backend parse_backend(std::string_view name) {
  if (name == "serial") return Backend::Serial;
  if (name == "openmp") return Backend::OpenMP;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

double structural_cell(const Environment& env, const EnvConfig& config, int row, int col) {
  const CellType t = env.type(row, col);
  if (t == CellType::Immovable) return std::min(config.struct_generation, config.structural_cap);
  if (!is_structural_propagator(t)) return 0.0;
  double best = 0.0;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      const int r = row + dr, c = col + dc;
      if (env.in_bounds(r, c)) best = std::max(best, env.value(env.index(r, c), kIntegrity));
    }
  const double decay = t == CellType::Earth ? config.struct_decay_earth : config.struct_decay_agent;
  return std::clamp(best - decay, 0.0, config.structural_cap);
}

void structural_sweep(const Environment& env, const EnvConfig& config, std::span<double> out,
                      Backend backend) {
  const int h = env.height(), w = env.width();
  if (out.size() != env.cell_count()) throw std::invalid_argument("structural_sweep: output size");
  if (backend == Backend::Serial) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) out[env.index(r, c)] = structural_cell(env, config, r, c);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out[env.index(r, c)] = structural_cell(env, config, r, c);
}

namespace {
constexpr Pos kFour[4] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
}

double diffusion_cell(const Environment& env, int channel, CellType material, double rate, int row,
                      int col) {
  const std::size_t idx = env.index(row, col);
  const double own = env.value(idx, channel);
  if (env.type(idx) != material) return own;
  double flow = 0.0;
  for (const Pos& d : kFour) {
    const int r = row + d.row, c = col + d.col;
    if (!env.in_bounds(r, c)) continue;
    const std::size_t n = env.index(r, c);
    if (env.type(n) != material) continue;
    flow += rate * (env.value(n, channel) - own) / 2.0;
  }
  return own + flow;
}

void diffusion_sweep(const Environment& env, int channel, CellType material, double rate,
                     std::span<double> out, Backend backend) {
  const int h = env.height(), w = env.width();
  if (out.size() != env.cell_count()) throw std::invalid_argument("diffusion_sweep: output size");
  if (backend == Backend::Serial) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) out[env.index(r, c)] = diffusion_cell(env, channel, material, rate, r, c);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out[env.index(r, c)] = diffusion_cell(env, channel, material, rate, r, c);
}

}  // namespace biome
