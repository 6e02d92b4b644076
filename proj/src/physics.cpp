#include "biome/physics.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "biome/agents.hpp"

namespace biome {

Environment gravity_step(Environment env) {
  const int h = env.height(), w = env.width();
  for (int r = h - 2; r >= 0; --r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t idx = env.index(r, c);
      const CellType t = env.type(idx);
      if (!is_gravity_affected(t)) continue;
      const std::size_t below = env.index(r + 1, c);
      if (!is_intangible(env.type(below))) continue;
      if (t != CellType::Earth && env.value(idx, kIntegrity) > 0.0) continue;
      env.swap_cells(idx, below);
    }
  }
  return env;
}

Environment structural_step(Environment env, const EnvConfig& config, Backend backend) {
  std::vector<double> next(env.cell_count());
  structural_sweep(env, config, next, backend);
  for (std::size_t i = 0; i < next.size(); ++i) env.value(i, kIntegrity) = next[i];
  return env;
}

Environment structural_update(Environment env, const EnvConfig& config, Backend backend) {
  std::vector<double> next(env.cell_count());
  for (int it = 0; it < config.struct_iterations_per_step; ++it) {
    structural_sweep(env, config, next, backend);
    for (std::size_t i = 0; i < next.size(); ++i) env.value(i, kIntegrity) = next[i];
  }
  return env;
}

Environment aging_step(Environment env) {
  for (std::size_t i = 0; i < env.cell_count(); ++i)
    if (is_agent(env.type(i))) env.value(i, kAge) += 1.0;
  return env;
}

namespace {

constexpr Pos kFour[4] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};

bool touches(const Environment& env, int row, int col, CellType what) {
  for (const Pos& d : kFour) {
    const int r = row + d.row, c = col + d.col;
    if (env.in_bounds(r, c) && env.type(r, c) == what) return true;
  }
  return false;
}

// Moves one channel from `source` material cells into adjacent `sink` agents.
void harvest_channel(Environment& env, const EnvConfig& config, int channel, CellType source,
                     CellType sink, NutrientLedger* ledger) {
  const std::size_t n = env.cell_count();
  const double cap = config.max_nutrient_cell;
  const double amount = config.absorption_amount;
  // Per-source request of each sink cell.
  std::vector<double> request(n, 0.0);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (env.type(i) != sink) continue;
    const Pos p = env.pos(i);
    int k = 0;
    for (const Pos& d : kNeighborOffsets) {
      const int r = p.row + d.row, c = p.col + d.col;
      if (env.in_bounds(r, c) && env.type(r, c) == source) ++k;
    }
    if (k == 0) continue;
    const double room = std::max(0.0, cap - env.value(i, channel));
    request[i] = std::min(amount, room / k);
    any = any || request[i] > 0.0;
  }
  if (!any) return;

  // Scale factor per source so that no source gives more than it holds.
  std::vector<double> scale(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (env.type(i) != source) continue;
    const Pos p = env.pos(i);
    double demand = 0.0;
    for (const Pos& d : kNeighborOffsets) {
      const int r = p.row + d.row, c = p.col + d.col;
      if (env.in_bounds(r, c)) demand += request[env.index(r, c)];
    }
    const double have = env.value(i, channel);
    if (demand > have) scale[i] = demand > 0.0 ? have / demand : 0.0;
  }

  std::vector<double> delta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (request[i] == 0.0) continue;
    const Pos p = env.pos(i);
    for (const Pos& d : kNeighborOffsets) {
      const int r = p.row + d.row, c = p.col + d.col;
      if (!env.in_bounds(r, c)) continue;
      const std::size_t s = env.index(r, c);
      if (env.type(s) != source) continue;
      const double moved = request[i] * scale[s];
      delta[i] += moved;
      delta[s] -= moved;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (delta[i] == 0.0) continue;
    double v = std::max(0.0, env.value(i, channel) + delta[i]);
    if (v > cap) {
      if (ledger) ledger->channel[channel].cap_lost += v - cap;
      v = cap;
    }
    env.value(i, channel) = v;
  }
}

}  // namespace

Environment generate_nutrients(Environment env, const EnvConfig& config, NutrientLedger* ledger) {
  const double cap = config.max_nutrient_cell;
  std::vector<std::pair<std::size_t, int>> targets;
  for (int r = 0; r < env.height(); ++r)
    for (int c = 0; c < env.width(); ++c) {
      const CellType t = env.type(r, c);
      if (t == CellType::Earth && touches(env, r, c, CellType::Immovable))
        targets.emplace_back(env.index(r, c), kEarthNutrient);
      else if (t == CellType::Air && touches(env, r, c, CellType::Sun))
        targets.emplace_back(env.index(r, c), kAirNutrient);
    }
  for (auto [idx, ch] : targets) {
    const double before = env.value(idx, ch);
    const double after = std::min(cap, before + config.generator_amount);
    env.value(idx, ch) = std::max(before, after);
    if (ledger) ledger->channel[ch].generated += env.value(idx, ch) - before;
  }
  return env;
}

Environment diffuse_nutrients(Environment env, const EnvConfig& config, Backend backend) {
  std::vector<double> next(env.cell_count());
  for (int it = 0; it < config.diffusion_iterations_per_step; ++it) {
    for (auto [ch, material] : {std::pair{kEarthNutrient, CellType::Earth}, std::pair{kAirNutrient, CellType::Air}}) {
      diffusion_sweep(env, ch, material, config.diffusion_rate, next, backend);
      for (std::size_t i = 0; i < next.size(); ++i)
        if (env.type(i) == material) env.value(i, ch) = next[i];
    }
  }
  return env;
}

Environment harvest_nutrients(Environment env, const EnvConfig& config, NutrientLedger* ledger) {
  harvest_channel(env, config, kEarthNutrient, CellType::Earth, CellType::AgentRoot, ledger);
  harvest_channel(env, config, kAirNutrient, CellType::Air, CellType::AgentLeaf, ledger);
  return env;
}

double dissipation_cost(const EnvConfig& config, CellType type, double age) {
  double cost = config.dissipation[specialization_index(type)];
  const double half = config.max_lifetime / 2.0;
  if (age > half) cost += config.aging_slope * (age - half);
  return cost;
}

int dissipate(Environment& env, const EnvConfig& config, NutrientLedger* ledger) {
  int deaths = 0;
  for (std::size_t i = 0; i < env.cell_count(); ++i) {
    const CellType t = env.type(i);
    if (!is_agent(t)) continue;
    const double cost = dissipation_cost(config, t, env.value(i, kAge));
    const double earth = env.value(i, kEarthNutrient);
    const double air = env.value(i, kAirNutrient);
    if (earth >= cost && air >= cost) {
      env.value(i, kEarthNutrient) = earth - cost;
      env.value(i, kAirNutrient) = air - cost;
      if (ledger) {
        ledger->channel[0].dissipated += cost;
        ledger->channel[1].dissipated += cost;
      }
      continue;
    }
    ++deaths;
    if (earth > 0.0) {
      env.reset_cell(i, CellType::Earth);
      env.value(i, kEarthNutrient) = earth;
      if (ledger) ledger->channel[1].destroyed += air;
    } else if (air > 0.0) {
      env.reset_cell(i, CellType::Air);
      env.value(i, kAirNutrient) = air;
    } else {
      env.reset_cell(i, CellType::Void);
    }
  }
  return deaths;
}

Environment energy_step(Environment env, const EnvConfig& config, NutrientLedger* ledger, int* deaths,
                        Backend backend) {
  env = generate_nutrients(std::move(env), config, ledger);
  env = diffuse_nutrients(std::move(env), config, backend);
  env = harvest_nutrients(std::move(env), config, ledger);
  const int died = dissipate(env, config, ledger);
  if (deaths) *deaths = died;
  return env;
}

std::string stats_csv_header() {
  return "step,n_agents,births,deaths,n_repro_success,n_repro_attempts,selected,placed,failed_no_ground,"
         "failed_table_full";
}

std::string stats_csv_row(const StepStats& s) {
  std::ostringstream out;
  out << s.step << ',' << s.n_agents << ',' << s.births << ',' << s.deaths << ',' << s.n_repro_success << ','
      << s.n_repro_attempts << ',' << s.repro.selected << ',' << s.repro.placed << ','
      << s.repro.failed_no_ground << ',' << s.repro.failed_table_full;
  return out.str();
}

namespace {

struct AgentWork {
  ParallelOp parallel;
  ExclusiveInterface exclusive;
  bool reproduce = false;
};

void evaluate_cell(const Environment& env, const EnvConfig& config, const StepRng& rng, std::size_t idx,
                   const AgentLogic& logic, Perception& perception, AgentWork& out) {
  perceive_into(env, env.pos(idx), config.perceive_agent_ids, perception);
  const double noise = rng.stream(Substep::AgentNoise, idx).uniform() * 2.0 - 1.0;
  AgentOutputs o = logic.evaluate(perception, config, noise);
  out.parallel = sanitize_parallel(o.parallel, perception, idx, config);
  out.exclusive = o.exclusive;
  out.reproduce = o.reproduce.trigger;
}

}  // namespace

StepResult step(Environment env, ProgramStore programs, const EnvConfig& config, const StepRng& rng,
                const StepOptions& options) {
  StepStats stats;
  stats.step = rng.step;
  NutrientLedger& ledger = stats.ledger;

  std::vector<std::size_t> agents;
  for (std::size_t i = 0; i < env.cell_count(); ++i)
    if (is_agent(env.type(i))) agents.push_back(i);

  std::map<AgentId, AgentLogic> logic_by_id;
  std::vector<const AgentLogic*> logic(agents.size());
  std::vector<AgentId> ids(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const AgentId id = env.agent_id(agents[a]);
    ids[a] = id;
    auto it = logic_by_id.find(id);
    if (it == logic_by_id.end()) {
      const ProgramEntry* entry = programs.find(id);
      if (!entry) throw std::logic_error("agent id " + std::to_string(id) + " has no program");
      it = logic_by_id.emplace(id, AgentLogic(entry->logic)).first;
    }
    logic[a] = &it->second;
  }

  std::vector<AgentWork> work(agents.size());
  const long count = static_cast<long>(agents.size());
  if (options.backend == Backend::OpenMP) {
#pragma omp parallel
    {
      Perception perception;
#pragma omp for schedule(dynamic, 64)
      for (long a = 0; a < count; ++a) evaluate_cell(env, config, rng, agents[a], *logic[a], perception, work[a]);
    }
  } else {
    Perception perception;
    for (long a = 0; a < count; ++a) evaluate_cell(env, config, rng, agents[a], *logic[a], perception, work[a]);
  }

  std::vector<ParallelOp> parallel_ops;
  std::vector<SpawnRequest> spawns;
  parallel_ops.reserve(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    parallel_ops.push_back(std::move(work[a].parallel));
    spawns.push_back({agents[a], work[a].exclusive});
  }
  env = apply_parallel(std::move(env), parallel_ops, config, &ledger);

  std::vector<ExclusiveOp> exclusive = propose_air(env, rng);
  auto earth = propose_earth(env, rng);
  auto spawned = propose_spawn(spawns, env, config, rng);
  exclusive.insert(exclusive.end(), std::make_move_iterator(earth.begin()), std::make_move_iterator(earth.end()));
  exclusive.insert(exclusive.end(), std::make_move_iterator(spawned.begin()),
                   std::make_move_iterator(spawned.end()));
  env = resolve_exclusive(std::move(env), exclusive, rng, &ledger, &stats.exclusive);

  std::vector<ReproduceOp> repro;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (!work[a].reproduce) continue;
    const std::size_t idx = agents[a];
    if (env.agent_id(idx) != ids[a]) continue;
    if (auto op = sanitize_reproduce(ReproduceInterface{true}, env, idx, config)) repro.push_back(*op);
  }
  auto rr = reproduce_pipeline(std::move(env), repro, std::move(programs), options.mutator, rng, config,
                               options.intercept, &ledger);
  env = std::move(rr.env);
  programs = std::move(rr.programs);
  stats.repro = rr.stats;

  env = gravity_step(std::move(env));
  env = structural_update(std::move(env), config, options.backend);
  env = aging_step(std::move(env));
  int starved = 0;
  env = energy_step(std::move(env), config, &ledger, &starved, options.backend);

  stats.n_agents = count_agents(env);
  stats.births = stats.exclusive.spawned + 2 * stats.repro.placed;
  stats.deaths = starved + stats.repro.selected;
  stats.n_repro_success = options.intercept ? stats.repro.intercepted_success : stats.repro.placed;
  stats.n_repro_attempts = stats.repro.attempts;
  return {std::move(env), std::move(programs), stats};
}

Simulation::Simulation(Environment env, ProgramStore programs, EnvConfig config, std::uint64_t seed,
                       StepOptions options)
    : env_(std::move(env)),
      programs_(std::move(programs)),
      config_(std::move(config)),
      seed_(seed),
      options_(std::move(options)) {
  config_.validate();
  if (env_.state_size() != config_.state_size) throw ConfigError("environment state size differs from config");
}

const StepStats& Simulation::advance() {
  auto result = step(std::move(env_), std::move(programs_), config_, StepRng{seed_, step_}, options_);
  env_ = std::move(result.env);
  programs_ = std::move(result.programs);
  last_ = result.stats;
  ++step_;
  return last_;
}

}  // namespace biome
