#include "biome/environment.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <set>
#include <sstream>

namespace biome {

Environment::Environment(int height, int width, int state_size)
    : height_(height),
      width_(width),
      state_size_(state_size),
      types_(static_cast<std::size_t>(height) * width, CellType::Void),
      states_(static_cast<std::size_t>(height) * width * state_size, 0.0),
      agent_ids_(static_cast<std::size_t>(height) * width, kNullAgent) {
  if (height <= 0 || width <= 0) throw EnvironmentError("environment dimensions must be positive");
  if (state_size < 4) throw EnvironmentError("state_size must be >= 4");
}

void Environment::swap_cells(std::size_t a, std::size_t b) {
  std::swap(types_[a], types_[b]);
  std::swap(agent_ids_[a], agent_ids_[b]);
  std::swap_ranges(states_.begin() + a * state_size_, states_.begin() + (a + 1) * state_size_,
                   states_.begin() + b * state_size_);
}

void Environment::reset_cell(std::size_t idx, CellType t) {
  types_[idx] = t;
  agent_ids_[idx] = kNullAgent;
  auto s = state(idx);
  std::fill(s.begin(), s.end(), 0.0);
}

EnvBlueprint parse_blueprint(std::string_view text) {
  EnvBlueprint bp;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == ';') continue;
    if (line.rfind("seeds:", 0) == 0) {
      std::istringstream cols(line.substr(6));
      int c = 0;
      while (cols >> c) bp.seed_columns.push_back(c);
      continue;
    }
    bp.rows.push_back(line);
  }
  bp.height = static_cast<int>(bp.rows.size());
  bp.width = bp.rows.empty() ? 0 : static_cast<int>(bp.rows.front().size());
  return bp;
}

std::string format_blueprint(const EnvBlueprint& blueprint) {
  std::string out;
  for (const auto& row : blueprint.rows) {
    out += row;
    out += '\n';
  }
  if (!blueprint.seed_columns.empty()) {
    out += "seeds:";
    for (int c : blueprint.seed_columns) out += ' ' + std::to_string(c);
    out += '\n';
  }
  return out;
}

bool is_fertile(const EnvBlueprint& blueprint) {
  bool earth = false, air = false, immovable = false, sun = false;
  for (const auto& row : blueprint.rows) {
    for (char c : row) {
      earth |= c == 'e';
      air |= c == 'a';
      immovable |= c == '#';
      sun |= c == 's';
    }
  }
  return earth && air && immovable && sun && !blueprint.seed_columns.empty();
}

Environment new_environment(const EnvBlueprint& blueprint, const EnvConfig& config) {
  config.validate();
  if (blueprint.height <= 0 || blueprint.width <= 0)
    throw EnvironmentError("blueprint dimensions must be positive");
  if (static_cast<int>(blueprint.rows.size()) != blueprint.height)
    throw EnvironmentError("blueprint has " + std::to_string(blueprint.rows.size()) +
                           " rows, expected " + std::to_string(blueprint.height));
  Environment env(blueprint.height, blueprint.width, config.state_size);
  for (int r = 0; r < blueprint.height; ++r) {
    const auto& row = blueprint.rows[r];
    if (static_cast<int>(row.size()) != blueprint.width)
      throw EnvironmentError("blueprint row " + std::to_string(r) + " has width " +
                             std::to_string(row.size()) + ", expected " +
                             std::to_string(blueprint.width));
    for (int c = 0; c < blueprint.width; ++c) {
      auto t = from_legend_char(row[c]);
      if (!t) throw EnvironmentError(std::string("unknown blueprint material '") + row[c] + "'");
      env.set_type(env.index(r, c), *t);
    }
  }
  return env;
}

std::optional<int> find_seed_interface(const Environment& env, int column) {
  if (column < 0 || column >= env.width()) return std::nullopt;
  for (int r = 0; r + 1 < env.height(); ++r) {
    const CellType upper = env.type(r, column);
    const CellType lower = env.type(r + 1, column);
    if ((upper == CellType::Air || upper == CellType::Void) && lower == CellType::Earth) return r;
  }
  return std::nullopt;
}

void write_seed(Environment& env, int column, int upper_row, AgentId id, Nutrients per_cell) {
  for (int r : {upper_row, upper_row + 1}) {
    const auto idx = env.index(r, column);
    env.reset_cell(idx, CellType::AgentUnspecialized);
    env.set_agent_id(idx, id);
    env.value(idx, kEarthNutrient) = per_cell.earth;
    env.value(idx, kAirNutrient) = per_cell.air;
  }
}

Environment place_seed(Environment env, int column, AgentId id, Nutrients per_cell) {
  if (id == kNullAgent) throw EnvironmentError("seed agent id must be non-null");
  auto row = find_seed_interface(env, column);
  if (!row) throw SeedPlacementFailed("no fertile interface in column " + std::to_string(column));
  write_seed(env, column, *row, id, per_cell);
  return env;
}

int count_agents(const Environment& env) {
  return static_cast<int>(std::count_if(env.types().begin(), env.types().end(),
                                        [](CellType t) { return is_agent(t); }));
}

bool is_extinct(const Environment& env) { return count_agents(env) == 0; }

std::vector<AgentId> distinct_agent_ids(const Environment& env) {
  std::set<AgentId> ids;
  for (std::size_t i = 0; i < env.cell_count(); ++i)
    if (is_agent(env.type(i))) ids.insert(env.agent_id(i));
  return {ids.begin(), ids.end()};
}

namespace {

constexpr std::uint32_t kSnapshotMagic = 0x45414342;  // "BCAE" little-endian
constexpr std::uint32_t kSnapshotVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& off) {
  if (off + 4 > in.size()) throw EnvironmentError("truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
  off += 4;
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize(const Environment& env) {
  std::vector<std::uint8_t> out;
  const std::size_t n = env.cell_count();
  out.reserve(20 + n * (1 + 4 * env.state_size() + 4));
  put_u32(out, kSnapshotMagic);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(env.height()));
  put_u32(out, static_cast<std::uint32_t>(env.width()));
  put_u32(out, static_cast<std::uint32_t>(env.state_size()));
  for (CellType t : env.types()) out.push_back(static_cast<std::uint8_t>(t));
  for (double v : env.states()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  for (AgentId id : env.agent_ids()) put_u32(out, id);
  return out;
}

Environment deserialize(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  if (get_u32(bytes, off) != kSnapshotMagic) throw EnvironmentError("bad snapshot magic");
  const auto version = get_u32(bytes, off);
  if (version != kSnapshotVersion)
    throw EnvironmentError("unsupported snapshot version " + std::to_string(version));
  const auto h = static_cast<int>(get_u32(bytes, off));
  const auto w = static_cast<int>(get_u32(bytes, off));
  const auto k = static_cast<int>(get_u32(bytes, off));
  Environment env(h, w, k);
  const std::size_t n = env.cell_count();
  if (bytes.size() != 20 + n * (1 + 4 * static_cast<std::size_t>(k) + 4))
    throw EnvironmentError("snapshot size does not match header");
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_valid_cell_type(bytes[off])) throw EnvironmentError("invalid cell type in snapshot");
    env.set_type(i, static_cast<CellType>(bytes[off++]));
  }
  for (std::size_t i = 0; i < n * k; ++i)
    env.value(i / k, static_cast<int>(i % k)) = std::bit_cast<float>(get_u32(bytes, off));
  for (std::size_t i = 0; i < n; ++i) env.set_agent_id(i, get_u32(bytes, off));
  return env;
}

}  // namespace biome
