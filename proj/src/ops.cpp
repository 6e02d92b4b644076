#include "biome/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace biome {

ChannelLedger& ChannelLedger::operator+=(const ChannelLedger& o) {
  generated += o.generated;
  dissipated += o.dissipated;
  op_costs += o.op_costs;
  destroyed += o.destroyed;
  cap_lost += o.cap_lost;
  return *this;
}

NutrientLedger& NutrientLedger::operator+=(const NutrientLedger& o) {
  channel[0] += o.channel[0];
  channel[1] += o.channel[1];
  return *this;
}

double total_nutrient(const Environment& env, int channel) {
  double sum = 0.0;
  for (std::size_t i = 0; i < env.cell_count(); ++i) sum += env.value(i, channel);
  return sum;
}

namespace {

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

Nutrients nutrients_of(const Environment& env, std::size_t idx) {
  return {env.value(idx, kEarthNutrient), env.value(idx, kAirNutrient)};
}

void add_destroyed(NutrientLedger* ledger, Nutrients n) {
  if (!ledger) return;
  ledger->channel[0].destroyed += n.earth;
  ledger->channel[1].destroyed += n.air;
}

void add_costs(NutrientLedger* ledger, Nutrients n) {
  if (!ledger) return;
  ledger->channel[0].op_costs += n.earth;
  ledger->channel[1].op_costs += n.air;
}

std::ptrdiff_t neighbor_index(const Environment& env, std::size_t idx, int k) {
  const Pos p = env.pos(idx);
  const int r = p.row + kNeighborOffsets[k].row;
  const int c = p.col + kNeighborOffsets[k].col;
  if (!env.in_bounds(r, c)) return -1;
  return static_cast<std::ptrdiff_t>(env.index(r, c));
}

constexpr int opposite(int k) { return 7 - k; }

}  // namespace

ParallelOp sanitize_parallel(const ParallelInterface& interface, const Perception& perception,
                             std::size_t actor, const EnvConfig& config) {
  ParallelOp op;
  op.actor = actor;
  const CellType self = perception.self();
  const double earth = perception.nutrient(4, kEarthNutrient);
  const double air = perception.nutrient(4, kAirNutrient);

  if (is_agent(self)) {
    int best = -1;
    double best_logit = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < kNumSpecializations; ++t) {
      const double l = interface.specialize_logits[t];
      if (std::isnan(l)) continue;
      if (best < 0 || l > best_logit) {
        best = t;
        best_logit = l;
      }
    }
    if (best >= 0) {
      const CellType target = specialization_type(best);
      const Nutrients cost = config.specialize_cost;
      if (target != self && earth >= cost.earth && air >= cost.air) {
        op.specialize = target;
        op.cost = cost;
      }
    }
  }

  const double avail[2] = {std::max(0.0, earth - op.cost.earth), std::max(0.0, air - op.cost.air)};
  double requested[2] = {0.0, 0.0};
  std::array<std::array<double, 2>, 8> g{};
  for (int k = 0; k < 8; ++k) {
    if (!is_agent(perception.types[window_of_neighbor(k)])) continue;
    for (int c = 0; c < 2; ++c) {
      g[k][c] = std::max(0.0, finite_or(interface.gifts[k][c], 0.0));
      requested[c] += g[k][c];
    }
  }
  for (int c = 0; c < 2; ++c) {
    if (requested[c] > avail[c]) {
      const double scale = requested[c] > 0.0 ? avail[c] / requested[c] : 0.0;
      for (int k = 0; k < 8; ++k) g[k][c] *= scale;
    }
  }
  for (int k = 0; k < 8; ++k) op.gifts[k] = {g[k][0], g[k][1]};

  const int internal = perception.state_size - kInternalBegin;
  if (!interface.internal.empty() && internal > 0) {
    const auto own = perception.state(4);
    op.internal.assign(own.begin() + kInternalBegin, own.end());
    const std::size_t n = std::min<std::size_t>(interface.internal.size(), internal);
    for (std::size_t i = 0; i < n; ++i) op.internal[i] = finite_or(interface.internal[i], op.internal[i]);
  }
  return op;
}

Environment apply_parallel(Environment env, std::span<const ParallelOp> ops, const EnvConfig& config,
                           NutrientLedger* ledger) {
  if (ops.empty()) return env;
  const std::size_t n = env.cell_count();
  std::vector<std::ptrdiff_t> op_at(n, -1);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].actor >= n) throw std::out_of_range("parallel op actor out of range");
    if (op_at[ops[i].actor] >= 0) throw std::invalid_argument("duplicate parallel op actor");
    op_at[ops[i].actor] = static_cast<std::ptrdiff_t>(i);
  }

  std::vector<double> incoming(2 * n, 0.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    for (int k = 0; k < 8; ++k) {
      const auto q = neighbor_index(env, idx, k);
      if (q < 0 || op_at[q] < 0) continue;
      const Nutrients& gift = ops[op_at[q]].gifts[opposite(k)];
      incoming[2 * idx] += gift.earth;
      incoming[2 * idx + 1] += gift.air;
    }
  }

  const double cap = config.max_nutrient_cell;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const ParallelOp* op = op_at[idx] >= 0 ? &ops[op_at[idx]] : nullptr;
    if (!op && incoming[2 * idx] == 0.0 && incoming[2 * idx + 1] == 0.0) continue;
    for (int c = 0; c < 2; ++c) {
      double value = env.value(idx, c);
      if (op) {
        double out = 0.0;
        for (int k = 0; k < 8; ++k) out += c == 0 ? op->gifts[k].earth : op->gifts[k].air;
        value = value - (c == 0 ? op->cost.earth : op->cost.air) - out;
        value = std::max(0.0, value);
      }
      value += incoming[2 * idx + c];
      if (value > cap) {
        if (ledger) ledger->channel[c].cap_lost += value - cap;
        value = cap;
      }
      env.value(idx, c) = value;
    }
    if (!op) continue;
    add_costs(ledger, op->cost);
    if (op->specialize) env.set_type(idx, *op->specialize);
    if (!op->internal.empty()) {
      auto s = env.state(idx);
      std::copy(op->internal.begin(), op->internal.end(), s.begin() + kInternalBegin);
    }
  }
  return env;
}

CellValue read_cell(const Environment& env, std::size_t idx) {
  const auto s = env.state(idx);
  return {env.type(idx), {s.begin(), s.end()}, env.agent_id(idx)};
}

void write_cell(Environment& env, std::size_t idx, const CellValue& value) {
  env.set_type(idx, value.type);
  env.set_agent_id(idx, value.id);
  auto s = env.state(idx);
  std::copy(value.state.begin(), value.state.end(), s.begin());
}

std::vector<ExclusiveOp> propose_air(const Environment& env, const StepRng& rng) {
  std::vector<ExclusiveOp> ops;
  std::array<std::size_t, 8> free{};
  for (std::size_t idx = 0; idx < env.cell_count(); ++idx) {
    if (env.type(idx) != CellType::Air) continue;
    int count = 0;
    for (int k = 0; k < 8; ++k) {
      const auto q = neighbor_index(env, idx, k);
      if (q >= 0 && env.type(q) == CellType::Void) free[count++] = static_cast<std::size_t>(q);
    }
    if (count == 0) continue;
    auto r = rng.stream(Substep::AirSpread, idx);
    ExclusiveOp op;
    op.kind = ExclusiveKind::AirSpread;
    op.actor = idx;
    op.target = free[r.below(count)];
    op.new_target = {CellType::Air, std::vector<double>(env.state_size(), 0.0), kNullAgent};
    op.new_actor = read_cell(env, idx);
    ops.push_back(std::move(op));
  }
  return ops;
}

std::vector<ExclusiveOp> propose_earth(const Environment& env, const StepRng& rng) {
  std::vector<ExclusiveOp> ops;
  auto free = [&](int r, int c) {
    if (!env.in_bounds(r, c)) return false;
    const CellType t = env.type(r, c);
    return t == CellType::Void || t == CellType::Air;
  };
  for (std::size_t idx = 0; idx < env.cell_count(); ++idx) {
    if (env.type(idx) != CellType::Earth) continue;
    const Pos p = env.pos(idx);
    const bool supported = p.row == env.height() - 1 || !is_intangible(env.type(p.row + 1, p.col));
    if (!supported) continue;
    std::array<int, 2> sides{};
    int count = 0;
    for (int s : {-1, 1})
      if (free(p.row, p.col + s) && free(p.row + 1, p.col + s)) sides[count++] = s;
    if (count == 0) continue;
    auto r = rng.stream(Substep::EarthSlide, idx);
    const int side = sides[r.below(count)];
    ExclusiveOp op;
    op.kind = ExclusiveKind::EarthSlide;
    op.actor = idx;
    op.target = env.index(p.row, p.col + side);
    op.new_target = read_cell(env, idx);
    op.new_actor = read_cell(env, op.target);
    ops.push_back(std::move(op));
  }
  return ops;
}

std::optional<ExclusiveOp> sanitize_spawn(const ExclusiveInterface& interface, const Environment& env,
                                          std::size_t actor, const EnvConfig& config, Rng& rng) {
  const double coin = rng.uniform();
  const double pick = rng.uniform();
  if (!is_agent(env.type(actor))) return std::nullopt;
  const double logit = interface.spawn_logit;
  if (std::isnan(logit)) return std::nullopt;
  const double p = 1.0 / (1.0 + std::exp(-logit));
  if (!(coin < p)) return std::nullopt;

  double max_logit = -std::numeric_limits<double>::infinity();
  for (double l : interface.direction_logits)
    if (!std::isnan(l)) max_logit = std::max(max_logit, l);
  std::array<double, 8> weight{};
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double l = interface.direction_logits[k];
    weight[k] = (std::isnan(l) || !std::isfinite(max_logit)) ? 0.0 : std::exp(l - max_logit);
    total += weight[k];
  }
  int dir = 7;
  if (total > 0.0) {
    double u = pick * total;
    for (int k = 0; k < 8; ++k) {
      if (u < weight[k]) {
        dir = k;
        break;
      }
      u -= weight[k];
    }
  } else {
    dir = static_cast<int>(pick * 8.0);
  }

  const auto q = neighbor_index(env, actor, dir);
  if (q < 0) return std::nullopt;
  const auto target = static_cast<std::size_t>(q);
  const CellType tt = env.type(target);
  if (tt != CellType::Void && tt != CellType::Air && tt != CellType::Earth) return std::nullopt;

  const Nutrients own = nutrients_of(env, actor);
  const Nutrients cost = config.spawn_cost;
  if (own.earth < cost.earth || own.air < cost.air) return std::nullopt;
  const double frac = std::clamp(finite_or(interface.child_fraction, 0.5), 0.0, 1.0);
  const Nutrients rest{own.earth - cost.earth, own.air - cost.air};
  const Nutrients child{rest.earth * frac, rest.air * frac};

  ExclusiveOp op;
  op.kind = ExclusiveKind::Spawn;
  op.actor = actor;
  op.target = target;
  op.cost = cost;
  op.new_actor = read_cell(env, actor);
  op.new_actor.state[kEarthNutrient] = rest.earth - child.earth;
  op.new_actor.state[kAirNutrient] = rest.air - child.air;
  op.new_target.type = CellType::AgentUnspecialized;
  op.new_target.id = env.agent_id(actor);
  op.new_target.state.assign(env.state_size(), 0.0);
  op.new_target.state[kEarthNutrient] = child.earth;
  op.new_target.state[kAirNutrient] = child.air;
  op.new_target.state[kAge] = env.value(actor, kAge);
  // Integrity the child would get from its parent on the next structural sweep.
  op.new_target.state[kIntegrity] = std::max(0.0, env.value(actor, kIntegrity) - config.struct_decay_agent);
  for (int i = kInternalBegin; i < env.state_size(); ++i) op.new_target.state[i] = env.value(actor, i);
  return op;
}

std::vector<ExclusiveOp> propose_spawn(std::span<const SpawnRequest> requests, const Environment& env,
                                       const EnvConfig& config, const StepRng& rng) {
  std::vector<ExclusiveOp> ops;
  for (const auto& req : requests) {
    auto r = rng.stream(Substep::Spawn, req.actor);
    if (auto op = sanitize_spawn(req.interface, env, req.actor, config, r)) ops.push_back(std::move(*op));
  }
  return ops;
}

std::size_t pick_winner(std::size_t target, std::size_t candidates, const StepRng& rng) {
  return static_cast<std::size_t>(rng.stream(Substep::Resolve, target).below(candidates));
}

Environment resolve_exclusive(Environment env, std::span<const ExclusiveOp> ops, const StepRng& rng,
                              NutrientLedger* ledger, ExclusiveStats* stats,
                              std::vector<std::size_t>* write_log) {
  if (stats) stats->proposed += static_cast<int>(ops.size());
  if (ops.empty()) return env;
  std::vector<std::size_t> order(ops.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ops[a].target != ops[b].target) return ops[a].target < ops[b].target;
    return ops[a].actor < ops[b].actor;
  });

  std::vector<std::size_t> winners;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && ops[order[j]].target == ops[order[i]].target) ++j;
    winners.push_back(order[i + pick_winner(ops[order[i]].target, j - i, rng)]);
    i = j;
  }

  std::vector<char> targeted(env.cell_count(), 0);
  for (std::size_t w : winners) targeted[ops[w].target] = 1;

  for (std::size_t w : winners) {
    const ExclusiveOp& op = ops[w];
    if (targeted[op.actor]) continue;
    const Nutrients before_a = nutrients_of(env, op.actor);
    const Nutrients before_t = nutrients_of(env, op.target);
    write_cell(env, op.target, op.new_target);
    write_cell(env, op.actor, op.new_actor);
    if (write_log) {
      write_log->push_back(op.target);
      write_log->push_back(op.actor);
    }
    const Nutrients after_a = nutrients_of(env, op.actor);
    const Nutrients after_t = nutrients_of(env, op.target);
    add_costs(ledger, op.cost);
    add_destroyed(ledger, {before_a.earth + before_t.earth - after_a.earth - after_t.earth - op.cost.earth,
                           before_a.air + before_t.air - after_a.air - after_t.air - op.cost.air});
    if (stats) {
      ++stats->committed;
      if (op.kind == ExclusiveKind::Spawn) ++stats->spawned;
    }
  }
  return env;
}

ReproStats& ReproStats::operator+=(const ReproStats& o) {
  attempts += o.attempts;
  selected += o.selected;
  placed += o.placed;
  failed_no_ground += o.failed_no_ground;
  failed_table_full += o.failed_table_full;
  intercepted_success += o.intercepted_success;
  return *this;
}

std::optional<ReproduceOp> sanitize_reproduce(const ReproduceInterface& interface, const Environment& env,
                                              std::size_t idx, const EnvConfig& config) {
  if (!interface.trigger || env.type(idx) != CellType::AgentFlower) return std::nullopt;
  const Nutrients own = nutrients_of(env, idx);
  const Nutrients cost = config.reproduce_cost;
  if (own.earth < cost.earth || own.air < cost.air) return std::nullopt;
  return ReproduceOp{idx, {own.earth - cost.earth, own.air - cost.air}, env.agent_id(idx)};
}

int adjacent_air(const Environment& env, std::size_t idx) {
  int n = 0;
  for (int k = 0; k < 8; ++k) {
    const auto q = neighbor_index(env, idx, k);
    if (q >= 0 && env.type(q) == CellType::Air) ++n;
  }
  return n;
}

ReproduceResult reproduce_pipeline(Environment env, std::span<const ReproduceOp> ops, ProgramStore programs,
                                   const MutatorConfig& mutator, const StepRng& rng, const EnvConfig& config,
                                   bool intercept, NutrientLedger* ledger) {
  ReproduceResult result{std::move(env), std::move(programs), {}, {}, {}};
  auto& world = result.env;
  auto& stats = result.stats;
  stats.attempts = static_cast<int>(ops.size());
  if (ops.empty()) return result;

  std::vector<ReproduceOp> pool(ops.begin(), ops.end());
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.flower < b.flower; });
  std::vector<double> weight;
  weight.reserve(pool.size());
  for (const auto& op : pool) weight.push_back(adjacent_air(world, op.flower));

  auto r = rng.stream(Substep::Reproduce, 0);
  std::vector<ReproduceOp> chosen;
  for (int n = 0; n < config.max_reproduce_per_step; ++n) {
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    if (total <= 0.0) break;
    double u = r.uniform() * total;
    std::size_t pick = 0;
    for (; pick + 1 < weight.size(); ++pick) {
      if (u < weight[pick]) break;
      u -= weight[pick];
    }
    while (weight[pick] <= 0.0) --pick;  // guard against rounding past the last positive weight
    chosen.push_back(pool[pick]);
    weight[pick] = 0.0;
  }
  if (chosen.empty()) return result;
  if (!intercept) result.programs.prune(world);

  for (const auto& op : chosen) {
    ++stats.selected;
    result.selected.push_back(op.flower);
    add_costs(ledger, config.reproduce_cost);
    world.reset_cell(op.flower, CellType::Void);

    if (intercept) {
      if (op.remaining.earth >= config.seed_min_nutrient && op.remaining.air >= config.seed_min_nutrient)
        ++stats.intercepted_success;
      add_destroyed(ledger, op.remaining);
      continue;
    }
    auto parent = result.programs.handle(op.parent);
    if (!parent) throw std::logic_error("flower without a program");
    if (config.reproduction_variation && result.programs.full()) {
      ++stats.failed_table_full;
      add_destroyed(ledger, op.remaining);
      continue;
    }

    const Pos at = world.pos(op.flower);
    std::vector<int> candidates;
    for (int d = config.reproduce_min_dist; d <= config.reproduce_max_dist; ++d) {
      candidates.push_back(at.col - d);
      if (d > 0) candidates.push_back(at.col + d);
    }
    for (std::size_t i = candidates.size(); i-- > 1;)
      std::swap(candidates[i], candidates[r.below(i + 1)]);
    std::optional<std::pair<int, int>> spot;
    for (int col : candidates) {
      if (col < 0 || col >= world.width()) continue;
      if (auto row = find_seed_interface(world, col)) {
        spot = {col, *row};
        break;
      }
    }
    if (!spot) {
      ++stats.failed_no_ground;
      add_destroyed(ledger, op.remaining);
      continue;
    }

    AgentId id;
    if (config.reproduction_variation) {
      auto mr = rng.stream(Substep::Mutate, op.flower);
      id = result.programs.insert(spawn_child_params(*parent, mutator, mr));
    } else {
      id = result.programs.insert_shared(parent);
    }
    const auto [col, row] = *spot;
    const Nutrients displaced_upper = nutrients_of(world, world.index(row, col));
    const Nutrients displaced_lower = nutrients_of(world, world.index(row + 1, col));
    add_destroyed(ledger, {displaced_upper.earth + displaced_lower.earth, displaced_upper.air + displaced_lower.air});
    write_seed(world, col, row, id, {op.remaining.earth / 2.0, op.remaining.air / 2.0});
    ++stats.placed;
    result.new_ids.push_back(id);
  }
  return result;
}

}  // namespace biome
