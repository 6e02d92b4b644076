#pragma once

#include <cstddef>
#include <cstdint>
#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "biome/cell_type.hpp"
#include "biome/config.hpp"

namespace biome {

using AgentId = std::uint32_t;
inline constexpr AgentId kNullAgent = 0;

// Fixed state channel layout.
inline constexpr int kEarthNutrient = 0;
inline constexpr int kAirNutrient = 1;
inline constexpr int kAge = 2;
inline constexpr int kIntegrity = 3;
inline constexpr int kInternalBegin = 4;

struct Pos {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pos&, const Pos&) = default;
};

// Neighbour offsets in row-major order of the 3x3 window, skipping the centre.
// Index k here corresponds to window index k < 4 ? k : k + 1.
inline constexpr std::array<Pos, 8> kNeighborOffsets{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};
inline constexpr int kNorth = 1;
inline constexpr int kSouth = 6;

class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeedPlacementFailed : public EnvironmentError {
 public:
  using EnvironmentError::EnvironmentError;
};

// The whole world: type, state and agent-id grids of identical shape. State
// values are kept in double precision in memory; snapshots store float32.
class Environment {
 public:
  Environment() = default;
  Environment(int height, int width, int state_size);

  int height() const { return height_; }
  int width() const { return width_; }
  int state_size() const { return state_size_; }
  std::size_t cell_count() const { return types_.size(); }

  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }
  Pos pos(std::size_t idx) const {
    return {static_cast<int>(idx / width_), static_cast<int>(idx % width_)};
  }

  CellType type(std::size_t idx) const { return types_[idx]; }
  CellType type(int row, int col) const { return types_[index(row, col)]; }
  void set_type(std::size_t idx, CellType t) { types_[idx] = t; }

  AgentId agent_id(std::size_t idx) const { return agent_ids_[idx]; }
  AgentId agent_id(int row, int col) const { return agent_ids_[index(row, col)]; }
  void set_agent_id(std::size_t idx, AgentId id) { agent_ids_[idx] = id; }

  std::span<double> state(std::size_t idx) {
    return {states_.data() + idx * state_size_, static_cast<std::size_t>(state_size_)};
  }
  std::span<const double> state(std::size_t idx) const {
    return {states_.data() + idx * state_size_, static_cast<std::size_t>(state_size_)};
  }
  double& value(std::size_t idx, int channel) { return states_[idx * state_size_ + channel]; }
  double value(std::size_t idx, int channel) const { return states_[idx * state_size_ + channel]; }

  const std::vector<CellType>& types() const { return types_; }
  const std::vector<double>& states() const { return states_; }
  const std::vector<AgentId>& agent_ids() const { return agent_ids_; }

  // Swap full cell contents (type, state, id).
  void swap_cells(std::size_t a, std::size_t b);
  // Reset a cell to the given material with zero state and null id.
  void reset_cell(std::size_t idx, CellType t);

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int state_size_ = 0;
  std::vector<CellType> types_;
  std::vector<double> states_;
  std::vector<AgentId> agent_ids_;
};

// Text layout of a world. One character per cell, legend:
//   '.' Void, 'a' Air, 'e' Earth, '#' Immovable, 's' Sun.
struct EnvBlueprint {
  int width = 0;
  int height = 0;
  std::vector<std::string> rows;
  std::vector<int> seed_columns;

  friend bool operator==(const EnvBlueprint&, const EnvBlueprint&) = default;
};

// Parses the text form: layout rows, optionally followed by a line
// "seeds: c1 c2 ...". Blank lines and lines starting with ';' are ignored.
EnvBlueprint parse_blueprint(std::string_view text);
std::string format_blueprint(const EnvBlueprint& blueprint);

// True if every required material (Earth, Air, Immovable, Sun) is present and
// at least one seed position is given.
bool is_fertile(const EnvBlueprint& blueprint);

Environment new_environment(const EnvBlueprint& blueprint, const EnvConfig& config);

// Writes a two-cell seed at the topmost Air/Void-over-Earth interface of the
// column. Throws SeedPlacementFailed without touching the world otherwise.
Environment place_seed(Environment env, int column, AgentId id, Nutrients per_cell);

// Locates the seed interface (upper cell row) in a column, if any.
std::optional<int> find_seed_interface(const Environment& env, int column);
// Writes seed cells at a known interface. No validation beyond bounds.
void write_seed(Environment& env, int column, int upper_row, AgentId id, Nutrients per_cell);

int count_agents(const Environment& env);
bool is_extinct(const Environment& env);
std::vector<AgentId> distinct_agent_ids(const Environment& env);

// Snapshot format: "BCAE" magic, u32 version, u32 height, u32 width,
// u32 state_size, then row-major type bytes, float32 states and u32 ids, all
// little-endian.
std::vector<std::uint8_t> serialize(const Environment& env);
Environment deserialize(std::span<const std::uint8_t> bytes);

}  // namespace biome
