#include "biome/record.hpp"

#include <cstdio>
#include <sstream>

#include "biome/evolve.hpp"
#include "biome/io.hpp"

namespace biome {
namespace {

bool is_snapshot_step(int step, int every, int last) {
  return step == 0 || step == last || (every > 0 && step % every == 0);
}

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%06d.bin", step);
  return buf;
}

}  // namespace

RunRecord record_run(const Preset& preset, const AgentParams& root, const MutatorConfig& mutator, std::uint64_t seed,
                     int steps, int snapshot_every, Backend backend) {
  RunRecord rec{preset, root, mutator, seed, steps, snapshot_every, {}, {}};
  Simulation sim = make_simulation(preset, root, mutator, seed, false, backend);
  rec.snapshots[0] = serialize(sim.env());
  for (int s = 1; s <= steps; ++s) {
    rec.stats.push_back(sim.advance());
    if (is_snapshot_step(s, snapshot_every, steps)) rec.snapshots[s] = serialize(sim.env());
  }
  return rec;
}

void save_record(const std::filesystem::path& dir, const RunRecord& record) {
  std::filesystem::create_directories(dir / "snapshots");
  nlohmann::json j{{"format", "biome-run-record"},
                   {"version", 1},
                   {"preset", record.preset},
                   {"mutator", record.mutator},
                   {"seed", record.seed},
                   {"steps", record.steps},
                   {"snapshot_every", record.snapshot_every},
                   {"architecture", std::string(to_string(record.root_params.architecture))}};
  write_text(dir / "record.json", j.dump(2) + "\n");
  save_params(dir / "root.params", record.root_params);
  std::ostringstream csv;
  csv << stats_csv_header() << '\n';
  for (const auto& s : record.stats) csv << stats_csv_row(s) << '\n';
  write_text(dir / "stats.csv", csv.str());
  for (const auto& [step, bytes] : record.snapshots) write_bytes(dir / "snapshots" / snapshot_name(step), bytes);
}

RunRecord load_record(const std::filesystem::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(dir / "record.json"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid record.json: " + std::string(e.what()));
  }
  if (j.value("format", "") != "biome-run-record") throw IoError("not a run record: " + dir.string());
  if (j.value("version", 0) != 1) throw IoError("unsupported run record version");
  RunRecord rec;
  j.at("preset").get_to(rec.preset);
  j.at("mutator").get_to(rec.mutator);
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.steps = j.at("steps").get<int>();
  rec.snapshot_every = j.at("snapshot_every").get<int>();
  rec.root_params = load_params(dir / "root.params");
  for (int s = 0; s <= rec.steps; ++s) {
    if (!is_snapshot_step(s, rec.snapshot_every, rec.steps)) continue;
    const auto path = dir / "snapshots" / snapshot_name(s);
    if (std::filesystem::exists(path)) rec.snapshots[s] = read_bytes(path);
  }
  return rec;
}

ReplayReport replay(const RunRecord& record, Backend backend) {
  ReplayReport report;
  Simulation sim = make_simulation(record.preset, record.root_params, record.mutator, record.seed, false, backend);
  auto check = [&](int step) {
    auto it = record.snapshots.find(step);
    if (it == record.snapshots.end()) return;
    ++report.snapshots_checked;
    if (serialize(sim.env()) != it->second) report.mismatched_steps.push_back(step);
  };
  check(0);
  for (int s = 1; s <= record.steps; ++s) {
    sim.advance();
    check(s);
  }
  return report;
}

}  // namespace biome
