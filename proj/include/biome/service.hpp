#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biome/evolve.hpp"
#include "biome/mutators.hpp"
#include "biome/record.hpp"
#include "biome/render.hpp"

namespace biome {

// Error with a stable machine-readable code and an HTTP status.
class SessionError : public std::runtime_error {
 public:
  SessionError(std::string code, int status, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), status_(status) {}
  const std::string& code() const { return code_; }
  int status() const { return status_; }

 private:
  std::string code_;
  int status_;
};

struct SessionConfig {
  std::string preset = "pestilence";
  MutatorConfig mutator{};
  int n_candidates = 8;
  std::uint64_t seed = 0;
  int petri_steps = 300;
  int petri_height = kPetriHeight;
  int petri_width = kPetriWidth;
  int frame_every = 5;
};

struct Candidate {
  ProgramEntry entry;
  std::vector<IndexedFrame> frames;
  int n_repro = 0;
};

struct DeployRequest {
  std::string preset{};  // empty: the session's preset
  int height = 48;
  int width = 96;
  int steps = 1000;
  int reps = 16;
};

struct DeployResult {
  EvalReport report;
  RunRecord record;
};

// Children of `parent` for one generation. Candidate i depends only on the
// parent, the session seed, the generation and i.
std::vector<ProgramEntry> candidate_children(const ProgramEntry& parent, const MutatorConfig& mutator,
                                             std::uint64_t seed, int generation, int n);

// Intercepted Petri run of one candidate with its playback frames.
Candidate play_candidate(ProgramEntry entry, const Preset& petri, int steps, int frame_every, std::uint64_t seed);

class Session {
 public:
  enum class State { Choosing, Deployed };

  Session(std::string id, SessionConfig config, const AgentParams& init);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }
  int generation() const { return static_cast<int>(history_.size()); }
  const ProgramEntry& parent() const { return parent_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }
  const std::vector<int>& history() const { return history_; }
  State state() const { return state_; }

  // The chosen child becomes the parent and a new batch is generated.
  void choose(int index);
  // Evaluates the current parent on a real (non-intercepted) world. Closes the session.
  const DeployResult& deploy(const DeployRequest& request);
  const std::optional<DeployResult>& deployment() const { return deployment_; }

 private:
  void generate();

  std::string id_;
  SessionConfig config_;
  Preset petri_;
  ProgramEntry parent_;
  std::vector<Candidate> candidates_;
  std::vector<int> history_;
  State state_ = State::Choosing;
  std::optional<DeployResult> deployment_;
};

// Thread-safe set of sessions. Each session has its own lock, so requests on
// different sessions do not wait for each other.
class SessionManager {
 public:
  explicit SessionManager(AgentParams init = init_minimal()) : init_(std::move(init)) {}

  std::string create(const SessionConfig& config);

  // Runs fn with the session locked; throws SessionError("not_found") if absent.
  template <typename Fn>
  auto with_session(const std::string& id, Fn&& fn) {
    std::shared_ptr<Slot> slot = find(id);
    std::lock_guard lock(slot->mutex);
    return fn(*slot->session);
  }

 private:
  struct Slot {
    std::mutex mutex;
    std::unique_ptr<Session> session;
  };
  std::shared_ptr<Slot> find(const std::string& id);

  AgentParams init_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t counter_ = 0;
};

// JSON views used by the HTTP API.
inline constexpr int kApiVersion = 1;
nlohmann::json session_summary(const Session& s);
nlohmann::json candidate_payload(const Session& s, int index);
nlohmann::json report_json(const EvalReport& r);

}  // namespace biome
