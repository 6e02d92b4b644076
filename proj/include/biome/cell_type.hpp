#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace biome {

enum class CellType : std::uint8_t {
  Void = 0,
  Air = 1,
  Earth = 2,
  Immovable = 3,
  Sun = 4,
  OutOfBounds = 5,
  AgentUnspecialized = 6,
  AgentRoot = 7,
  AgentLeaf = 8,
  AgentFlower = 9,
};

inline constexpr int kNumCellTypes = 10;
inline constexpr int kNumSpecializations = 4;

constexpr bool is_agent(CellType t) {
  return t == CellType::AgentUnspecialized || t == CellType::AgentRoot ||
         t == CellType::AgentLeaf || t == CellType::AgentFlower;
}

constexpr bool is_intangible(CellType t) {
  return t == CellType::Void || t == CellType::Air || t == CellType::Sun;
}

constexpr bool is_gravity_affected(CellType t) {
  return t == CellType::Earth || is_agent(t);
}

constexpr bool is_structural_propagator(CellType t) {
  return t == CellType::Earth || is_agent(t);
}

// Index 0..3 for Unspecialized, Root, Leaf, Flower.
constexpr int specialization_index(CellType t) {
  return static_cast<int>(t) - static_cast<int>(CellType::AgentUnspecialized);
}

constexpr CellType specialization_type(int index) {
  return static_cast<CellType>(index + static_cast<int>(CellType::AgentUnspecialized));
}

constexpr bool is_valid_cell_type(std::uint8_t raw) { return raw < kNumCellTypes; }

std::string_view to_string(CellType t);

// Blueprint legend character for storable materials.
char legend_char(CellType t);
std::optional<CellType> from_legend_char(char c);

}  // namespace biome
