#include <doctest.h>

#include <cmath>

#include "biome/mutators.hpp"
#include "biome/program_store.hpp"
#include "biome/rng.hpp"
#include "support.hpp"

using namespace biome;

TEST_CASE("zero sigma leaves parameters unchanged") {
  Rng rng(1);
  std::vector<float> v{1.0f, -2.0f, 3.5f};
  CHECK(mutate_basic(v, 0.0, rng) == v);
}

TEST_CASE("basic mutator updates a fifth of the coordinates") {
  Rng rng(2);
  const int n = 100000;
  std::vector<float> zero(n, 0.0f);
  const auto out = mutate_basic(zero, 0.01, rng);
  REQUIRE(out.size() == zero.size());
  int changed = 0;
  double sum_sq = 0.0;
  for (float v : out)
    if (v != 0.0f) {
      ++changed;
      sum_sq += static_cast<double>(v) * v;
    }
  CHECK(std::abs(changed / static_cast<double>(n) - 0.2) <= 0.005);
  // Changed deltas have the configured spread.
  CHECK(std::sqrt(sum_sq / changed) == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("adaptive mutator works on a doubled vector") {
  MutatorConfig config{.kind = MutatorKind::Adaptive};
  const auto root = make_root_entry(AgentParams{Architecture::Minimal, std::vector<float>(50, 0.5f)}, config);
  CHECK(root.mutator_state.size() == root.logic.values.size());
  std::vector<float> augmented(root.logic.values);
  augmented.insert(augmented.end(), root.mutator_state.begin(), root.mutator_state.end());
  Rng rng(3);
  CHECK(mutate_adaptive(augmented, rng, config).size() == 2 * root.logic.values.size());
  std::vector<float> odd(3);
  CHECK_THROWS(mutate_adaptive(odd, rng, config));
}

TEST_CASE("adaptive mutator with zero sigmas keeps parameters") {
  MutatorConfig config{.kind = MutatorKind::Adaptive};
  std::vector<float> augmented{1.0f, 2.0f, 0.0f, 0.0f};
  Rng rng(4);
  const auto out = mutate_adaptive(augmented, rng, config);
  CHECK(out[0] == 1.0f);
  CHECK(out[1] == 2.0f);
}

TEST_CASE("adaptive sigmas stay within their clamp") {
  MutatorConfig config{.kind = MutatorKind::Adaptive, .meta_update_prob = 1.0, .meta_sigma = 2.0};
  std::vector<float> augmented{0.0f, 0.0f, 0.5f, 1e-6f};
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    augmented = mutate_adaptive(std::move(augmented), rng, config);
    for (int k = 2; k < 4; ++k) {
      REQUIRE(augmented[k] >= static_cast<float>(kMinAdaptiveSigma));
      REQUIRE(augmented[k] <= static_cast<float>(kMaxAdaptiveSigma));
    }
  }
}

TEST_CASE("children") {
  const AgentParams logic{Architecture::Minimal, std::vector<float>(64, 0.25f)};
  SUBCASE("basic children carry no mutator state") {
    MutatorConfig config;
    Rng rng(6);
    const auto parent = make_root_entry(logic, config);
    const auto child = spawn_child_params(parent, config, rng);
    CHECK(child.mutator_state.empty());
    CHECK(child.logic.values.size() == logic.values.size());
    CHECK(parent.logic == logic);
  }
  SUBCASE("adaptive children change their sigmas") {
    MutatorConfig config{.kind = MutatorKind::Adaptive};
    const auto parent = make_root_entry(logic, config);
    int differs = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng rng(s);
      differs += spawn_child_params(parent, config, rng).mutator_state != parent.mutator_state;
    }
    CHECK(differs > 0);
  }
  SUBCASE("same stream, same child") {
    MutatorConfig config{.kind = MutatorKind::Adaptive};
    const auto parent = make_root_entry(logic, config);
    Rng a(9), b(9);
    CHECK(spawn_child_params(parent, config, a) == spawn_child_params(parent, config, b));
  }
}

TEST_CASE("mutator names and validation") {
  CHECK(parse_mutator_kind("basic") == MutatorKind::Basic);
  CHECK(parse_mutator_kind("adaptive") == MutatorKind::Adaptive);
  CHECK_THROWS(parse_mutator_kind("sexual"));
  MutatorConfig bad{.update_prob = 1.5};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("program store") {
  ProgramStore store(2);
  const ProgramEntry entry{AgentParams{Architecture::Minimal, {1.0f}}, {}};
  const AgentId a = store.insert(entry);
  const AgentId b = store.insert_shared(store.handle(a));
  CHECK(a == 1);
  CHECK(b == 2);
  CHECK(store.unique_programs() == 1);
  CHECK_FALSE(store.full());
  const AgentId c = store.insert(entry);
  CHECK(store.full());
  CHECK_THROWS_AS(store.insert(entry), ProgramStoreFull);

  auto env = testing::world({"U."});
  env.set_agent_id(0, c);
  store.prune(env);
  CHECK(store.size() == 1);
  CHECK(store.contains(c));
  CHECK(store.next_id() == 4);  // ids are never reused

  const auto bytes = store.serialize();
  CHECK(ProgramStore::deserialize(bytes) == store);
}
