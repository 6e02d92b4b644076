#include "biome/cell_type.hpp"

namespace biome {

std::string_view to_string(CellType t) {
  switch (t) {
    case CellType::Void: return "Void";
    case CellType::Air: return "Air";
    case CellType::Earth: return "Earth";
    case CellType::Immovable: return "Immovable";
    case CellType::Sun: return "Sun";
    case CellType::OutOfBounds: return "OutOfBounds";
    case CellType::AgentUnspecialized: return "AgentUnspecialized";
    case CellType::AgentRoot: return "AgentRoot";
    case CellType::AgentLeaf: return "AgentLeaf";
    case CellType::AgentFlower: return "AgentFlower";
  }
  return "?";
}

char legend_char(CellType t) {
  switch (t) {
    case CellType::Void: return '.';
    case CellType::Air: return 'a';
    case CellType::Earth: return 'e';
    case CellType::Immovable: return '#';
    case CellType::Sun: return 's';
    default: return '?';
  }
}

std::optional<CellType> from_legend_char(char c) {
  switch (c) {
    case '.': return CellType::Void;
    case 'a': return CellType::Air;
    case 'e': return CellType::Earth;
    case '#': return CellType::Immovable;
    case 's': return CellType::Sun;
    default: return std::nullopt;
  }
}

}  // namespace biome
