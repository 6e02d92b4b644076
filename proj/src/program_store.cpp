#include "biome/program_store.hpp"

#include <bit>
#include <set>
#include <string>

namespace biome {
namespace {

constexpr std::uint32_t kStoreMagic = 0x53414342;  // "BCAS"
constexpr std::uint32_t kStoreVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_floats(std::vector<std::uint8_t>& out, const std::vector<float>& values) {
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

struct Reader {
  std::span<const std::uint8_t> in;
  std::size_t off = 0;

  std::uint32_t u32() {
    if (off + 4 > in.size()) throw std::runtime_error("truncated program store");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
    off += 4;
    return v;
  }
  std::vector<float> floats() {
    const auto n = u32();
    if (off + 4ull * n > in.size()) throw std::runtime_error("truncated program store");
    std::vector<float> v(n);
    for (auto& f : v) f = std::bit_cast<float>(u32());
    return v;
  }
};

}  // namespace

std::size_t ProgramStore::unique_programs() const {
  std::set<const ProgramEntry*> distinct;
  for (const auto& [id, h] : entries_) distinct.insert(h.get());
  return distinct.size();
}

AgentId ProgramStore::insert(ProgramEntry entry) {
  if (full()) throw ProgramStoreFull("program table is full");
  const AgentId id = next_id_++;
  entries_.emplace(id, std::make_shared<const ProgramEntry>(std::move(entry)));
  return id;
}

AgentId ProgramStore::insert_shared(Handle program) {
  const AgentId id = next_id_++;
  entries_.emplace(id, std::move(program));
  return id;
}

const ProgramEntry* ProgramStore::find(AgentId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : it->second.get();
}

ProgramStore::Handle ProgramStore::handle(AgentId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : it->second;
}

void ProgramStore::prune(const Environment& env) {
  std::set<AgentId> live;
  for (std::size_t i = 0; i < env.cell_count(); ++i)
    if (is_agent(env.type(i))) live.insert(env.agent_id(i));
  std::erase_if(entries_, [&](const auto& kv) { return live.count(kv.first) == 0; });
}

std::vector<std::uint8_t> ProgramStore::serialize() const {
  std::vector<std::uint8_t> out;
  put_u32(out, kStoreMagic);
  put_u32(out, kStoreVersion);
  put_u32(out, static_cast<std::uint32_t>(max_programs_));
  put_u32(out, next_id_);
  std::map<const ProgramEntry*, std::uint32_t> index;
  std::vector<const ProgramEntry*> order;
  for (const auto& [id, h] : entries_) {
    if (index.emplace(h.get(), static_cast<std::uint32_t>(order.size())).second) order.push_back(h.get());
  }
  put_u32(out, static_cast<std::uint32_t>(order.size()));
  for (const ProgramEntry* p : order) {
    put_u32(out, static_cast<std::uint32_t>(p->logic.architecture));
    put_floats(out, p->logic.values);
    put_floats(out, p->mutator_state);
  }
  put_u32(out, static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [id, h] : entries_) {
    put_u32(out, id);
    put_u32(out, index.at(h.get()));
  }
  return out;
}

ProgramStore ProgramStore::deserialize(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  if (r.u32() != kStoreMagic) throw std::runtime_error("bad program store magic");
  if (r.u32() != kStoreVersion) throw std::runtime_error("unsupported program store version");
  ProgramStore store(static_cast<int>(r.u32()));
  store.next_id_ = r.u32();
  std::vector<Handle> programs(r.u32());
  for (auto& h : programs) {
    ProgramEntry e;
    const auto arch = r.u32();
    if (arch != static_cast<std::uint32_t>(Architecture::Minimal) &&
        arch != static_cast<std::uint32_t>(Architecture::Extended))
      throw std::runtime_error("unknown architecture tag " + std::to_string(arch));
    e.logic.architecture = static_cast<Architecture>(arch);
    e.logic.values = r.floats();
    e.mutator_state = r.floats();
    h = std::make_shared<const ProgramEntry>(std::move(e));
  }
  const auto n_ids = r.u32();
  for (std::uint32_t i = 0; i < n_ids; ++i) {
    const AgentId id = r.u32();
    const auto p = r.u32();
    if (p >= programs.size()) throw std::runtime_error("program index out of range");
    store.entries_.emplace(id, programs[p]);
  }
  if (r.off != bytes.size()) throw std::runtime_error("trailing bytes in program store");
  return store;
}

bool operator==(const ProgramStore& a, const ProgramStore& b) {
  if (a.max_programs_ != b.max_programs_ || a.next_id_ != b.next_id_) return false;
  if (a.entries_.size() != b.entries_.size()) return false;
  for (auto ia = a.entries_.begin(), ib = b.entries_.begin(); ia != a.entries_.end(); ++ia, ++ib)
    if (ia->first != ib->first || !(*ia->second == *ib->second)) return false;
  return true;
}

}  // namespace biome
