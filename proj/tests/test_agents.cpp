#include <doctest.h>

#include <cmath>

#include "biome/agents.hpp"
#include "biome/evolve.hpp"
#include "biome/ops.hpp"
#include "biome/presets.hpp"
#include "biome/rng.hpp"
#include "support.hpp"

using namespace biome;
using testing::world;

namespace {

int argmax(const std::array<double, kNumSpecializations>& logits) {
  int best = 0;
  for (int t = 1; t < kNumSpecializations; ++t)
    if (logits[t] > logits[best]) best = t;
  return best;
}

void feed(Environment& env, int r, int c, double amount) {
  env.value(env.index(r, c), kEarthNutrient) = amount;
  env.value(env.index(r, c), kAirNutrient) = amount;
}

// Random 3x3 neighbourhood around an agent at the centre.
Environment random_patch(Rng& rng, int state_size) {
  Environment env(3, 3, state_size);
  const CellType kinds[] = {CellType::Void, CellType::Air, CellType::Earth, CellType::Immovable, CellType::Sun,
                            CellType::AgentUnspecialized, CellType::AgentRoot, CellType::AgentLeaf,
                            CellType::AgentFlower};
  for (std::size_t i = 0; i < 9; ++i) {
    const CellType t = kinds[rng.below(9)];
    env.set_type(i, t);
    if (is_agent(t)) env.set_agent_id(i, static_cast<AgentId>(1 + rng.below(2)));
    for (double& v : env.state(i)) v = rng.uniform() * 5.0;
  }
  env.set_type(4, specialization_type(static_cast<int>(rng.below(4))));
  env.set_agent_id(4, 1);
  return env;
}

}  // namespace

TEST_CASE("perception") {
  SUBCASE("corner sees five out-of-bounds cells") {
    auto env = world({"Ua", "ae"});
    const auto p = perceive(env, {0, 0});
    int oob = 0;
    for (auto t : p.types) oob += t == CellType::OutOfBounds;
    CHECK(oob == 5);
    for (int w = 0; w < 9; ++w)
      if (p.types[w] == CellType::OutOfBounds)
        for (double v : p.state(w)) CHECK(v == 0.0);
  }
  SUBCASE("centre of uniform air") {
    auto env = world({"aaa", "aaa", "aaa"});
    const auto p = perceive(env, {1, 1});
    for (auto t : p.types) CHECK(t == CellType::Air);
  }
  SUBCASE("two-cell seed sees itself") {
    auto env = world({"a", "U", "U", "e"});
    const auto upper = perceive(env, {1, 0});
    const auto lower = perceive(env, {2, 0});
    CHECK(upper.same[7]);
    CHECK(lower.same[1]);
    CHECK_FALSE(upper.same[1]);
    // A foreign organism is not masked as the same one.
    env.set_agent_id(env.index(2, 0), 2);
    CHECK_FALSE(perceive(env, {1, 0}).same[7]);
    CHECK(perceive(env, {1, 0}, false).same[7]);
  }
}

TEST_CASE("parameter counts") {
  CHECK(parameter_count(Architecture::Minimal) >= 250);
  CHECK(parameter_count(Architecture::Minimal) <= 400);
  CHECK(parameter_count(Architecture::Extended) > 10000);
  CHECK(init_minimal() == init_minimal());
  CHECK(init_extended() == init_extended());
  for (float v : init_extended().values) CHECK(std::isfinite(v));
  check_params(init_minimal());
  check_params(init_extended());
  AgentParams bad = init_minimal();
  bad.values.pop_back();
  CHECK_THROWS_AS(check_params(bad), InvalidParams);
  bad = init_minimal();
  bad.values[3] = NAN;
  CHECK_THROWS_AS(check_params(bad), InvalidParams);
}

TEST_CASE("init logic specializes by surrounding material") {
  const EnvConfig config;
  const auto params = init_minimal();
  auto rooted = world({"aaa", "eUe", "eee"});
  CHECK(argmax(run_parallel(params, perceive(rooted, {1, 1}), config, 0.0).specialize_logits) ==
        specialization_index(CellType::AgentRoot));
  auto airy = world({"aaa", "aUa", "aaa"});
  CHECK(argmax(run_parallel(params, perceive(airy, {1, 1}), config, 0.0).specialize_logits) ==
        specialization_index(CellType::AgentLeaf));
}

TEST_CASE("zero params give well-formed outputs") {
  AgentParams zero{Architecture::Minimal, std::vector<float>(parameter_count(Architecture::Minimal), 0.0f)};
  auto env = world({"aUa", "aUa", "eUe"});
  feed(env, 1, 1, 2.0);
  const auto p = perceive(env, {1, 1});
  const auto out = evaluate_agent(zero, p, EnvConfig{}, 0.3);
  for (const auto& g : out.parallel.gifts) {
    CHECK(g[0] == out.parallel.gifts[1][0]);
    CHECK(g[1] == out.parallel.gifts[1][1]);
  }
  const auto op = sanitize_parallel(out.parallel, p, env.index(1, 1), EnvConfig{});
  CHECK_FALSE(op.specialize.has_value());  // all logits tie on the current type
}

TEST_CASE("starving cells do not spawn") {
  EnvConfig config;
  const auto params = init_minimal();
  auto env = world({"aaa", "aLa", "eRe", "eee"});
  feed(env, 1, 1, 0.1);
  feed(env, 2, 1, 0.1);
  for (auto pos : {Pos{1, 1}, Pos{2, 1}}) {
    const auto ex = run_exclusive(params, perceive(env, pos), config, 0.0);
    Rng rng(5);
    int spawned = 0;
    for (int i = 0; i < 200; ++i) spawned += sanitize_spawn(ex, env, env.index(pos.row, pos.col), config, rng).has_value();
    CHECK(spawned == 0);
  }
}

TEST_CASE("a rich root and leaf pair grows within five steps") {
  auto preset = make_preset("persistence", 16, 16);
  ProgramStore programs(preset.config.max_programs);
  const AgentId id = programs.insert(make_root_entry(init_minimal(), {}));
  auto env = seeded_environment(preset, id);
  for (std::size_t i = 0; i < env.cell_count(); ++i)
    if (is_agent(env.type(i))) {
      env.value(i, kEarthNutrient) = 6.0;
      env.value(i, kAirNutrient) = 6.0;
    }
  Simulation sim(env, programs, preset.config, 1);
  int births = 0;
  for (int i = 0; i < 5; ++i) births += sim.advance().births;
  CHECK(births > 0);
  CHECK(count_agents(sim.env()) > 2);
}

TEST_CASE("init flowers reproduce in a petri dish") {
  const auto result = petri_run(init_minimal(), make_petri("pestilence"), 300, 1);
  CHECK(result.first_selection_step.has_value());
  CHECK(result.n_repro >= 1);
}

TEST_CASE("extended init behaves exactly like minimal init") {
  Rng rng(17);
  const EnvConfig config{.state_size = 12};
  const auto minimal = init_minimal();
  const auto extended = init_extended();
  for (int trial = 0; trial < 100; ++trial) {
    const auto env = random_patch(rng, 12);
    const auto p = perceive(env, {1, 1});
    const double noise = rng.uniform() * 2.0 - 1.0;
    const auto a = evaluate_agent(minimal, p, config, noise);
    const auto b = evaluate_agent(extended, p, config, noise);
    const auto pa = sanitize_parallel(a.parallel, p, 4, config);
    const auto pb = sanitize_parallel(b.parallel, p, 4, config);
    CHECK(pa.specialize == pb.specialize);
    CHECK(pa.gifts == pb.gifts);
    Rng ra(trial), rb(trial);
    const auto sa = sanitize_spawn(a.exclusive, env, 4, config, ra);
    const auto sb = sanitize_spawn(b.exclusive, env, 4, config, rb);
    REQUIRE(sa.has_value() == sb.has_value());
    if (sa) {
      CHECK(sa->target == sb->target);
      CHECK(sa->new_target == sb->new_target);
    }
    CHECK(a.reproduce.trigger == b.reproduce.trigger);
  }
}

TEST_CASE("agent logic is total on random params and perceptions") {
  Rng rng(23);
  const EnvConfig config{.state_size = 12};
  for (auto arch : {Architecture::Minimal, Architecture::Extended}) {
    const int trials = arch == Architecture::Minimal ? 100000 : 2000;
    AgentParams params{arch, std::vector<float>(parameter_count(arch))};
    for (int trial = 0; trial < trials; ++trial) {
      if (trial % 1000 == 0)
        for (float& v : params.values) v = static_cast<float>(rng.normal() * 3.0);
      const auto env = random_patch(rng, 12);
      const auto p = perceive(env, {1, 1});
      const auto out = evaluate_agent(params, p, config, rng.uniform() * 2.0 - 1.0);
      bool finite = std::isfinite(out.exclusive.spawn_logit) && std::isfinite(out.exclusive.child_fraction);
      for (double l : out.parallel.specialize_logits) finite = finite && std::isfinite(l);
      for (double l : out.exclusive.direction_logits) finite = finite && std::isfinite(l);
      for (const auto& g : out.parallel.gifts) finite = finite && std::isfinite(g[0]) && std::isfinite(g[1]);
      for (double v : out.parallel.internal) finite = finite && std::isfinite(v);
      REQUIRE(finite);
    }
  }
}

TEST_CASE("outputs depend only on the 3x3 neighbourhood") {
  Rng rng(29);
  const auto params = init_extended();
  const EnvConfig config{.state_size = 12};
  for (int trial = 0; trial < 50; ++trial) {
    Environment env(7, 7, 12);
    for (std::size_t i = 0; i < env.cell_count(); ++i) {
      env.set_type(i, static_cast<CellType>(rng.below(5)));
      for (double& v : env.state(i)) v = rng.uniform();
    }
    env.set_type(env.index(3, 3), CellType::AgentLeaf);
    env.set_agent_id(env.index(3, 3), 1);
    const auto before = evaluate_agent(params, perceive(env, {3, 3}), config, 0.1);
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 7; ++c) {
        if (std::abs(r - 3) <= 1 && std::abs(c - 3) <= 1) continue;
        env.set_type(env.index(r, c), CellType::AgentFlower);
        env.value(env.index(r, c), kEarthNutrient) = 9.0;
      }
    const auto after = evaluate_agent(params, perceive(env, {3, 3}), config, 0.1);
    CHECK(before.parallel.specialize_logits == after.parallel.specialize_logits);
    CHECK(before.exclusive.direction_logits == after.exclusive.direction_logits);
    CHECK(before.reproduce.trigger == after.reproduce.trigger);
  }
}
