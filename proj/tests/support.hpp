#pragma once

#include <string>
#include <vector>

#include "biome/config.hpp"
#include "biome/environment.hpp"

namespace biome::testing {

// Blueprint legend plus agent letters: U unspecialized, R root, L leaf,
// F flower. Agents get id 1.
inline Environment world(const std::vector<std::string>& rows, int state_size = 6) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  Environment env(h, w, state_size);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto idx = env.index(r, c);
      CellType t = CellType::Void;
      switch (rows[r][c]) {
        case 'U': t = CellType::AgentUnspecialized; break;
        case 'R': t = CellType::AgentRoot; break;
        case 'L': t = CellType::AgentLeaf; break;
        case 'F': t = CellType::AgentFlower; break;
        default: t = *from_legend_char(rows[r][c]);
      }
      env.set_type(idx, t);
      if (is_agent(t)) env.set_agent_id(idx, 1);
    }
  }
  return env;
}

inline std::string type_row(const Environment& env, int r) {
  std::string out;
  for (int c = 0; c < env.width(); ++c) {
    const CellType t = env.type(r, c);
    switch (t) {
      case CellType::AgentUnspecialized: out += 'U'; break;
      case CellType::AgentRoot: out += 'R'; break;
      case CellType::AgentLeaf: out += 'L'; break;
      case CellType::AgentFlower: out += 'F'; break;
      default: out += legend_char(t);
    }
  }
  return out;
}

inline std::vector<std::string> type_rows(const Environment& env) {
  std::vector<std::string> out;
  for (int r = 0; r < env.height(); ++r) out.push_back(type_row(env, r));
  return out;
}

// Config with only the structural numbers that matter for small fixtures.
inline EnvConfig fixture_config() {
  EnvConfig c;
  c.struct_decay_earth = 1.0;
  c.struct_decay_agent = 5.0;
  c.struct_generation = 10.0;
  c.structural_cap = 10.0;
  return c;
}

}  // namespace biome::testing
