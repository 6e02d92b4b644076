#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "biome/environment.hpp"
#include "biome/mutators.hpp"

namespace biome {

class ProgramStoreFull : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bounded map from agent id to program. Several ids may share one program
// (reproduction without variation); capacity counts distinct programs.
class ProgramStore {
 public:
  using Handle = std::shared_ptr<const ProgramEntry>;

  explicit ProgramStore(int max_programs = 256) : max_programs_(max_programs) {}

  int max_programs() const { return max_programs_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t unique_programs() const;
  bool full() const { return static_cast<int>(unique_programs()) >= max_programs_; }
  AgentId next_id() const { return next_id_; }

  // Mints a fresh id for a new program. Throws ProgramStoreFull at capacity.
  AgentId insert(ProgramEntry entry);
  // Mints a fresh id bound to an existing program; never consumes capacity.
  AgentId insert_shared(Handle program);

  const ProgramEntry* find(AgentId id) const;
  Handle handle(AgentId id) const;
  bool contains(AgentId id) const { return entries_.count(id) != 0; }

  // Drops programs whose id no longer appears in the grid.
  void prune(const Environment& env);

  const std::map<AgentId, Handle>& entries() const { return entries_; }

  // Binary form: "BCAS" magic, u32 version, u32 max_programs, u32 next_id,
  // u32 program count, programs (u32 architecture, u32 n, n floats, u32 m,
  // m floats), u32 id count, (u32 id, u32 program index) pairs. Little-endian.
  std::vector<std::uint8_t> serialize() const;
  static ProgramStore deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const ProgramStore& a, const ProgramStore& b);

 private:
  int max_programs_;
  AgentId next_id_ = 1;
  std::map<AgentId, Handle> entries_;
};

}  // namespace biome
