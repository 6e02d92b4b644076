#include "biome/service.hpp"

#include <httplib.h>

#include <cstdio>

#include "biome/io.hpp"

namespace biome {

std::vector<ProgramEntry> candidate_children(const ProgramEntry& parent, const MutatorConfig& mutator,
                                             std::uint64_t seed, int generation, int n) {
  std::vector<ProgramEntry> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(hash_combine(hash_combine(seed, static_cast<std::uint64_t>(generation)), static_cast<std::uint64_t>(i)));
    out.push_back(spawn_child_params(parent, mutator, rng));
  }
  return out;
}

Candidate play_candidate(ProgramEntry entry, const Preset& petri, int steps, int frame_every, std::uint64_t seed) {
  Candidate c;
  c.entry = std::move(entry);
  Simulation sim = make_simulation(petri, c.entry.logic, MutatorConfig{}, seed, true);
  c.frames.push_back(index_frame(sim.env(), petri.config));
  for (int s = 1; s <= steps; ++s) {
    c.n_repro += sim.advance().n_repro_success;
    if (frame_every > 0 && (s % frame_every == 0 || s == steps)) c.frames.push_back(index_frame(sim.env(), petri.config));
  }
  return c;
}

Session::Session(std::string id, SessionConfig config, const AgentParams& init)
    : id_(std::move(id)), config_(std::move(config)) {
  if (config_.n_candidates < 1 || config_.n_candidates > 64)
    throw SessionError("bad_request", 400, "n_candidates must be in [1, 64]");
  if (config_.petri_steps < 0 || config_.petri_steps > 5000)
    throw SessionError("bad_request", 400, "petri_steps must be in [0, 5000]");
  try {
    config_.mutator.validate();
    petri_ = make_petri(config_.preset, config_.petri_height, config_.petri_width);
  } catch (const std::exception& e) {
    throw SessionError("bad_request", 400, e.what());
  }
  parent_ = make_root_entry(init, config_.mutator);
  generate();
}

void Session::generate() {
  auto children = candidate_children(parent_, config_.mutator, config_.seed, generation(), config_.n_candidates);
  std::vector<Candidate> next(children.size());
  const std::uint64_t petri_seed = hash_combine(config_.seed, 0xC0DEull + static_cast<std::uint64_t>(generation()));
  const int n = static_cast<int>(children.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i)
    next[i] = play_candidate(std::move(children[i]), petri_, config_.petri_steps, config_.frame_every, petri_seed);
  candidates_ = std::move(next);
}

void Session::choose(int index) {
  if (state_ != State::Choosing) throw SessionError("session_closed", 409, "session already deployed");
  if (index < 0 || index >= static_cast<int>(candidates_.size()))
    throw SessionError("invalid_index", 400, "candidate index out of range");
  parent_ = candidates_[index].entry;
  history_.push_back(index);
  generate();
}

const DeployResult& Session::deploy(const DeployRequest& request) {
  if (state_ != State::Choosing) throw SessionError("session_closed", 409, "session already deployed");
  if (request.steps < 0 || request.steps > 100000 || request.reps < 1 || request.reps > 64)
    throw SessionError("bad_request", 400, "steps must be in [0, 100000] and reps in [1, 64]");
  Preset preset;
  try {
    preset = make_preset(request.preset.empty() ? config_.preset : request.preset, request.height, request.width);
  } catch (const std::exception& e) {
    throw SessionError("bad_request", 400, e.what());
  }
  EvalOptions options;
  options.reps = request.reps;
  options.steps = request.steps;
  options.seed = config_.seed;
  options.mutator = config_.mutator;
  DeployResult result;
  result.report = evaluate(preset, parent_.logic, options);
  result.record = record_run(preset, parent_.logic, config_.mutator, replica_seed(config_.seed, 0), request.steps,
                             std::max(1, request.steps / 10));
  deployment_ = std::move(result);
  state_ = State::Deployed;
  return *deployment_;
}

std::string SessionManager::create(const SessionConfig& config) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%06llu", static_cast<unsigned long long>(++counter_));
    id = buf;
  }
  // Candidate generation can take a while; do it outside the manager lock.
  auto slot = std::make_shared<Slot>();
  slot->session = std::make_unique<Session>(id, config, init_);
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::shared_ptr<SessionManager::Slot> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError("not_found", 404, "no session '" + id + "'");
  return it->second;
}

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& x : r.replicas)
    reps.push_back({{"total_agents", x.total_agents}, {"extinct", x.extinct}, {"final_agents", x.final_agents}});
  return {{"mean_total_agents", r.mean_total},
          {"std_total_agents", r.std_total},
          {"extinctions", r.extinctions},
          {"extinction_percent", 100.0 * r.extinction_rate()},
          {"replicas", reps}};
}

nlohmann::json session_summary(const Session& s) {
  nlohmann::json cands = nlohmann::json::array();
  for (std::size_t i = 0; i < s.candidates().size(); ++i)
    cands.push_back({{"index", i}, {"n_repro", s.candidates()[i].n_repro}, {"frames", s.candidates()[i].frames.size()}});
  nlohmann::json j{{"version", kApiVersion},
                   {"session_id", s.id()},
                   {"preset", s.config().preset},
                   {"mutator", s.config().mutator},
                   {"generation", s.generation()},
                   {"history", s.history()},
                   {"state", s.state() == Session::State::Choosing ? "choosing" : "deployed"},
                   {"candidates", cands}};
  if (s.deployment()) j["deployment"] = report_json(s.deployment()->report);
  return j;
}

nlohmann::json candidate_payload(const Session& s, int index) {
  if (index < 0 || index >= static_cast<int>(s.candidates().size()))
    throw SessionError("invalid_index", 404, "candidate index out of range");
  const Candidate& c = s.candidates()[index];
  nlohmann::json pal = nlohmann::json::array();
  for (const Rgb& rgb : palette()) pal.push_back({rgb.r, rgb.g, rgb.b});
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : c.frames)
    frames.push_back(httplib::detail::base64_encode(std::string(f.pixels.begin(), f.pixels.end())));
  const int h = c.frames.empty() ? 0 : c.frames.front().height;
  const int w = c.frames.empty() ? 0 : c.frames.front().width;
  return {{"version", kApiVersion}, {"index", index},    {"n_repro", c.n_repro}, {"height", h},
          {"width", w},             {"encoding", "base64-indexed"}, {"palette", pal}, {"frames", frames}};
}

}  // namespace biome
