#include "biome/agents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "biome/rng.hpp"

namespace biome {
namespace {

namespace ml = minimal_layout;
namespace el = extended_layout;

// Global feature indices.
enum Feature : int {
  kBias = 0,
  kAirCount = 1,
  kEarthCount = 2,
  kVoidCount = 3,
  kSameCount = 4,
  kOwnEarth = 5,
  kOwnAir = 6,
  kOwnMin = 7,
  kAgeFraction = 8,
  kSameAbove = 9,
  kOpenAbove = 10,
  kSameFlowerCount = 11,
};

// Per-direction feature indices.
enum DirFeature : int {
  kDirBias = 0,
  kDirVoid = 1,
  kDirAir = 2,
  kDirEarth = 3,
  kDirUp = 4,
  kDirDown = 5,
  kDirDiagonal = 6,
  kDirBlocked = 7,
};

// Per-gift feature indices.
enum GiftFeature : int {
  kGiftBias = 0,
  kGiftSurplus = 1,
  kGiftOwn = 2,
  kGiftToFlower = 3,
  kGiftFromFlower = 4,
  kGiftToRoot = 5,
  kGiftToLeaf = 6,
  kGiftToUnspecialized = 7,
};

constexpr int U = 0, R = 1, L = 2, F = 3;

using Global = std::array<double, ml::kGlobalFeatures>;

Global global_features(const Perception& p, const EnvConfig& config) {
  Global x{};
  int air = 0, earth = 0, empty = 0, same = 0, same_flower = 0;
  for (int k = 0; k < 8; ++k) {
    const int w = window_of_neighbor(k);
    switch (p.types[w]) {
      case CellType::Air: ++air; break;
      case CellType::Earth: ++earth; break;
      case CellType::Void: ++empty; break;
      default: break;
    }
    if (p.same[w] && is_agent(p.types[w])) {
      ++same;
      if (p.types[w] == CellType::AgentFlower) ++same_flower;
    }
  }
  const double cap = config.max_nutrient_cell;
  const double e = p.nutrient(4, kEarthNutrient);
  const double a = p.nutrient(4, kAirNutrient);
  const int north = window_of_neighbor(kNorth);
  x[kBias] = 1.0;
  x[kAirCount] = air / 8.0;
  x[kEarthCount] = earth / 8.0;
  x[kVoidCount] = empty / 8.0;
  x[kSameCount] = same / 8.0;
  x[kOwnEarth] = e / cap;
  x[kOwnAir] = a / cap;
  x[kOwnMin] = std::min(e, a) / cap;
  x[kAgeFraction] = std::min(p.nutrient(4, kAge) / config.max_lifetime, 2.0);
  x[kSameAbove] = (p.same[north] && is_agent(p.types[north])) ? 1.0 : 0.0;
  x[kOpenAbove] = is_intangible(p.types[north]) ? 1.0 : 0.0;
  x[kSameFlowerCount] = same_flower / 8.0;
  return x;
}

template <std::size_t N>
double dot(const float* w, const std::array<double, N>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += static_cast<double>(w[i]) * x[i];
  return s;
}

std::array<double, ml::kDirFeatures> direction_features(const Perception& p, int k) {
  std::array<double, ml::kDirFeatures> d{};
  const CellType t = p.types[window_of_neighbor(k)];
  const Pos off = kNeighborOffsets[k];
  d[kDirBias] = 1.0;
  d[kDirVoid] = t == CellType::Void;
  d[kDirAir] = t == CellType::Air;
  d[kDirEarth] = t == CellType::Earth;
  d[kDirUp] = off.row == -1;
  d[kDirDown] = off.row == 1;
  d[kDirDiagonal] = off.row != 0 && off.col != 0;
  d[kDirBlocked] = !(t == CellType::Void || t == CellType::Air || t == CellType::Earth);
  return d;
}

std::array<double, ml::kGiftFeatures> gift_features(const Perception& p, int k, int channel,
                                                    double cap) {
  std::array<double, ml::kGiftFeatures> g{};
  const int w = window_of_neighbor(k);
  const CellType t = p.types[w];
  const double own = p.nutrient(4, channel) / cap;
  const double other = p.nutrient(w, channel) / cap;
  g[kGiftBias] = 1.0;
  g[kGiftSurplus] = own - other;
  g[kGiftOwn] = own;
  g[kGiftToFlower] = t == CellType::AgentFlower ? own : 0.0;
  g[kGiftFromFlower] = p.self() == CellType::AgentFlower;
  g[kGiftToRoot] = t == CellType::AgentRoot;
  g[kGiftToLeaf] = t == CellType::AgentLeaf;
  g[kGiftToUnspecialized] = t == CellType::AgentUnspecialized;
  return g;
}

bool hidden_outputs_active(const AgentParams& params) {
  if (params.architecture != Architecture::Extended) return false;
  const auto begin = params.values.begin() + el::kOutputWeights;
  return std::any_of(begin, params.values.end(), [](float v) { return v != 0.0f; });
}

void set(std::vector<float>& v, int offset, std::initializer_list<std::pair<int, float>> entries) {
  for (auto [i, w] : entries) v[offset + i] = w;
}

}  // namespace

std::string_view to_string(Architecture a) {
  return a == Architecture::Extended ? "extended" : "minimal";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "minimal") return Architecture::Minimal;
  if (name == "extended") return Architecture::Extended;
  throw InvalidParams("unknown architecture '" + std::string(name) + "'");
}

std::size_t parameter_count(Architecture a) {
  return a == Architecture::Extended ? el::kSize : ml::kSize;
}

void perceive_into(const Environment& env, Pos pos, bool agent_ids, Perception& out) {
  const int k = env.state_size();
  out.state_size = k;
  out.states.assign(static_cast<std::size_t>(9) * k, 0.0);
  const AgentId self_id = env.agent_id(pos.row, pos.col);
  const bool self_agent = is_agent(env.type(pos.row, pos.col));
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int w = (dr + 1) * 3 + (dc + 1);
      const int r = pos.row + dr, c = pos.col + dc;
      if (!env.in_bounds(r, c)) {
        out.types[w] = CellType::OutOfBounds;
        out.same[w] = false;
        continue;
      }
      const auto idx = env.index(r, c);
      out.types[w] = env.type(idx);
      const bool agent_pair = self_agent && is_agent(env.type(idx));
      out.same[w] = agent_pair && (!agent_ids || env.agent_id(idx) == self_id);
      const auto s = env.state(idx);
      std::copy(s.begin(), s.end(), out.states.begin() + static_cast<std::ptrdiff_t>(w) * k);
    }
  }
}

Perception perceive(const Environment& env, Pos pos, bool agent_ids) {
  Perception p;
  perceive_into(env, pos, agent_ids, p);
  return p;
}

void check_params(const AgentParams& params) {
  const auto expected = parameter_count(params.architecture);
  if (params.values.size() != expected)
    throw InvalidParams("expected " + std::to_string(expected) + " parameters for " +
                        std::string(to_string(params.architecture)) + ", got " +
                        std::to_string(params.values.size()));
  for (float v : params.values)
    if (!std::isfinite(v)) throw InvalidParams("non-finite parameter");
}

// The hand-set policy:
//  - unspecialised cells become roots when Earth outnumbers Air around them,
//    leaves when Air outnumbers Earth, and otherwise stay as they are;
//  - leaves with open sky above turn into flowers once mature and fed;
//  - same-organism neighbours equalise nutrients, flowers hoard and get fed;
//  - roots spawn into Earth (downwards first), leaves into Air/Void (upwards
//    first), once their poorer nutrient exceeds a threshold;
//  - flowers trigger reproduction once they can pay the cost and still leave
//    a viable seed.
AgentParams init_minimal() {
  AgentParams p{Architecture::Minimal, std::vector<float>(ml::kSize, 0.0f)};
  auto spec = [](int own, int target) {
    return ml::kSpecialize + (own * kNumSpecializations + target) * ml::kGlobalFeatures;
  };
  auto& v = p.values;
  for (int own = 0; own < kNumSpecializations; ++own)
    for (int target = 0; target < kNumSpecializations; ++target)
      if (own != target) v[spec(own, target) + kBias] = -10.0f;

  v[spec(U, U) + kBias] = 0.25f;
  set(v, spec(U, R), {{kBias, 0.0f}, {kEarthCount, 4.0f}, {kAirCount, -4.0f}});
  set(v, spec(U, L), {{kBias, 0.0f}, {kAirCount, 4.0f}, {kEarthCount, -4.0f}});
  set(v, spec(L, F), {{kBias, -24.0f},
                      {kAgeFraction, 40.0f},
                      {kOpenAbove, 4.0f},
                      {kOwnMin, 20.0f},
                      {kSameFlowerCount, -80.0f}});

  auto spawn = [](int own) { return ml::kSpawn + own * ml::kGlobalFeatures; };
  v[spawn(U) + kBias] = -10.0f;
  v[spawn(F) + kBias] = -10.0f;
  set(v, spawn(R), {{kBias, -9.0f}, {kOwnMin, 30.0f}});
  set(v, spawn(L), {{kBias, -9.0f}, {kOwnMin, 30.0f}});

  set(v, ml::kReproduce, {{kBias, -20.0f}, {kOwnMin, 50.0f}});

  auto dir = [](int own) { return ml::kDirection + own * ml::kDirFeatures; };
  set(v, dir(R), {{kDirEarth, 4.0f},
                  {kDirVoid, -3.0f},
                  {kDirAir, -3.0f},
                  {kDirDown, 2.0f},
                  {kDirUp, -3.0f},
                  {kDirDiagonal, -1.0f},
                  {kDirBlocked, -20.0f}});
  set(v, dir(L), {{kDirAir, 3.0f},
                  {kDirVoid, 3.0f},
                  {kDirEarth, -6.0f},
                  {kDirUp, 2.0f},
                  {kDirDown, -4.0f},
                  {kDirBlocked, -20.0f}});
  set(v, dir(U), {{kDirBlocked, -20.0f}});
  set(v, dir(F), {{kDirBlocked, -20.0f}});

  for (int c = 0; c < 2; ++c) {
    set(v, ml::kGift + c * ml::kGiftFeatures,
        {{kGiftSurplus, 0.11f}, {kGiftToFlower, 0.08f}, {kGiftFromFlower, -10.0f}});
  }
  return p;
}

AgentParams init_extended() {
  AgentParams p{Architecture::Extended, std::vector<float>(el::kSize, 0.0f)};
  const auto minimal = init_minimal();
  std::copy(minimal.values.begin(), minimal.values.end(), p.values.begin());
  // Fixed pseudo-random input weights so the hidden layer carries signal once
  // the (zero) output weights start to move.
  Rng rng(0xB10BA5Eull);
  const double scale = 1.0 / std::sqrt(static_cast<double>(el::kInputs));
  for (int i = 0; i < el::kHidden * el::kInputs; ++i)
    p.values[el::kHiddenWeights + i] = static_cast<float>(rng.normal() * scale);
  return p;
}

AgentLogic::AgentLogic(const AgentParams& params)
    : params_(&params), hidden_active_(hidden_outputs_active(params)) {
  if (params.values.size() != parameter_count(params.architecture))
    throw InvalidParams("parameter vector length does not match architecture");
}

AgentOutputs evaluate_agent(const AgentParams& params, const Perception& perception,
                            const EnvConfig& config, double noise) {
  return AgentLogic(params).evaluate(perception, config, noise);
}

AgentOutputs AgentLogic::evaluate(const Perception& perception, const EnvConfig& config,
                                  double noise) const {
  const AgentParams& params = *params_;
  const float* w = params.values.data();
  const CellType self = perception.self();
  const int own = is_agent(self) ? specialization_index(self) : U;
  const double cap = config.max_nutrient_cell;
  const Global x = global_features(perception, config);

  std::array<double, el::kOutputs> delta{};
  std::vector<double> internal_update;
  if (hidden_active_) {
    std::array<double, el::kInputs> z{};
    std::copy(x.begin(), x.end(), z.begin());
    const int available = std::min(el::kInternal, perception.state_size - kInternalBegin);
    for (int i = 0; i < available; ++i)
      z[ml::kGlobalFeatures + i] = perception.nutrient(4, kInternalBegin + i);
    z[el::kInputs - 1] = noise;
    std::array<double, el::kHidden> h{};
    for (int j = 0; j < el::kHidden; ++j)
      h[j] = std::tanh(dot(w + el::kHiddenWeights + j * el::kInputs, z) + w[el::kHiddenBias + j]);
    for (int o = 0; o < el::kOutputs; ++o) delta[o] = dot(w + el::kOutputWeights + o * el::kHidden, h);
    if (available > 0) {
      internal_update.resize(available);
      for (int i = 0; i < available; ++i)
        internal_update[i] = perception.nutrient(4, kInternalBegin + i) +
                             dot(w + el::kInternalWeights + i * el::kHidden, h);
    }
  }

  AgentOutputs out;
  auto& par = out.parallel;
  for (int t = 0; t < kNumSpecializations; ++t)
    par.specialize_logits[t] =
        dot(w + ml::kSpecialize + (own * kNumSpecializations + t) * ml::kGlobalFeatures, x) + delta[t];

  for (int k = 0; k < 8; ++k) {
    const int win = window_of_neighbor(k);
    if (!perception.same[win] || !is_agent(perception.types[win])) continue;
    for (int c = 0; c < 2; ++c) {
      const auto g = gift_features(perception, k, c, cap);
      const double raw = dot(w + ml::kGift + c * ml::kGiftFeatures, g) + delta[14 + k * 2 + c];
      par.gifts[k][c] = cap * std::max(0.0, raw);
    }
  }
  par.internal = std::move(internal_update);

  auto& ex = out.exclusive;
  ex.spawn_logit = dot(w + ml::kSpawn + own * ml::kGlobalFeatures, x) + delta[4];
  for (int k = 0; k < 8; ++k)
    ex.direction_logits[k] =
        dot(w + ml::kDirection + own * ml::kDirFeatures, direction_features(perception, k)) + delta[6 + k];
  ex.child_fraction = 0.5;

  out.reproduce.trigger = dot(w + ml::kReproduce, x) + delta[5] > 0.0;
  return out;
}

ParallelInterface run_parallel(const AgentParams& params, const Perception& perception,
                               const EnvConfig& config, double noise) {
  return evaluate_agent(params, perception, config, noise).parallel;
}

ExclusiveInterface run_exclusive(const AgentParams& params, const Perception& perception,
                                 const EnvConfig& config, double noise) {
  return evaluate_agent(params, perception, config, noise).exclusive;
}

ReproduceInterface run_reproduce(const AgentParams& params, const Perception& perception,
                                 const EnvConfig& config, double noise) {
  return evaluate_agent(params, perception, config, noise).reproduce;
}

}  // namespace biome
