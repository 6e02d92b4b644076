#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "biome/agents.hpp"
#include "biome/evolve.hpp"
#include "biome/presets.hpp"
#include "biome/rng.hpp"

using namespace biome;

namespace {

double norm_to(const std::vector<double>& x, const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return std::sqrt(s);
}

AgentParams random_params(Rng& rng, double scale) {
  auto p = init_minimal();
  for (float& v : p.values) v = static_cast<float>(v + rng.normal() * scale);
  return p;
}

}  // namespace

TEST_CASE("fitness") {
  CHECK(fitness(250387, false) == 250387.0);
  CHECK(fitness(0, true) == -1000000.0);
  CHECK(fitness(151439, true) == -848561.0);
  for (double a : {0.0, 10.0, 1e5})
    for (bool e : {false, true}) CHECK(fitness(a + 1.0, e) >= fitness(a, e));
}

TEST_CASE("petri fitness") {
  const std::vector<int> fifty(300, 50), fortynine(300, 49);
  CHECK(petri_fitness(fifty, 0) == 0.0);
  CHECK(petri_fitness(fortynine, 0) == -300.0);
  CHECK(petri_fitness(fortynine, 1, 50, 7.0) - petri_fitness(fortynine, 0, 50, 7.0) == 7.0);
  CHECK(petri_fitness(fortynine, 3) - petri_fitness(fortynine, 2) == kPetriLambda);
}

TEST_CASE("centered ranks") {
  const std::vector<double> v{3.0, 1.0, 2.0};
  CHECK(centered_ranks(v) == std::vector<double>{0.5, -0.5, 0.0});
  const std::vector<double> ties{1.0, 5.0, 5.0, 0.0};
  const auto r = centered_ranks(ties);
  CHECK(r[1] == r[2]);
  CHECK(r[1] == doctest::Approx(2.5 / 3.0 - 0.5));
  const std::vector<double> flat(6, 4.0);
  for (double x : centered_ranks(flat)) CHECK(x == 0.0);
}

TEST_CASE("pgpe samples come in mirrored pairs") {
  PgpeConfig config{.population = 8};
  const auto state = pgpe_init({1.0, -2.0, 0.5}, config);
  Rng rng(1);
  const auto s = pgpe_ask(state, config, rng);
  REQUIRE(s.params.size() == 8);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t d = 0; d < 3; ++d) {
      CHECK(s.params[2 * i][d] == state.center[d] + s.noise[i][d]);
      CHECK(s.params[2 * i + 1][d] == state.center[d] - s.noise[i][d]);
    }
  PgpeConfig odd{.population = 7};
  CHECK_THROWS(pgpe_ask(state, odd, rng));
}

TEST_CASE("pgpe ignores uniformly equal fitness") {
  PgpeConfig config{.population = 8};
  const auto state = pgpe_init({1.0, 2.0}, config);
  Rng rng(2);
  const auto s = pgpe_ask(state, config, rng);
  const std::vector<double> flat(8, 3.0);
  const auto next = pgpe_step(state, flat, s, config);
  CHECK(next.center == state.center);
  CHECK(next.stdev == state.stdev);
}

TEST_CASE("pgpe moves along the better mirrored sample") {
  PgpeConfig config{.population = 2};
  const auto state = pgpe_init({0.0}, config);
  Rng rng(3);
  const auto s = pgpe_ask(state, config, rng);
  // Antisymmetric fitness f(x) = x: whichever sample wins, the step points up.
  const std::vector<double> f{s.params[0][0], s.params[1][0]};
  const auto next = pgpe_step(state, f, s, config);
  CHECK(next.center[0] > 0.0);
  // First Adam step has magnitude lr.
  CHECK(std::abs(next.center[0]) == doctest::Approx(config.center_lr));
}

TEST_CASE("pgpe std changes are bounded") {
  PgpeConfig config{.population = 16, .std_lr = 100.0};
  auto state = pgpe_init(std::vector<double>(4, 0.0), config);
  Rng rng(4);
  for (int g = 0; g < 20; ++g) {
    const auto before = state.stdev;
    const auto s = pgpe_ask(state, config, rng);
    std::vector<double> f;
    for (const auto& x : s.params) f.push_back(-std::abs(x[0]));
    state = pgpe_step(std::move(state), f, s, config);
    for (std::size_t d = 0; d < 4; ++d) {
      CHECK(state.stdev[d] <= before[d] * (1.0 + config.max_std_change) + 1e-15);
      CHECK(state.stdev[d] >= before[d] * (1.0 - config.max_std_change) - 1e-15);
    }
  }
}

TEST_CASE("pgpe solves a quadratic") {
  const int dim = 64;
  Rng target_rng(5);
  std::vector<double> c(dim);
  for (double& x : c) x = target_rng.uniform() * 2.0 - 1.0;
  PgpeConfig config{.population = 32, .center_lr = 0.02, .init_std = 0.1};
  auto state = pgpe_init(std::vector<double>(dim, 0.0), config);
  Rng rng(6);
  for (int g = 0; g < 200; ++g) {
    const auto s = pgpe_ask(state, config, rng);
    std::vector<double> f;
    for (const auto& x : s.params) f.push_back(-std::pow(norm_to(x, c), 2));
    state = pgpe_step(std::move(state), f, s, config);
  }
  CHECK(norm_to(state.center, c) < 0.05);
}

TEST_CASE("evaluation") {
  const auto preset = make_preset("persistence", 24, 32);
  SUBCASE("zero steps") {
    const auto report = evaluate(preset, init_minimal(), {.reps = 1, .steps = 0});
    REQUIRE(report.replicas.size() == 1);
    CHECK(report.replicas[0].total_agents == 0);
    CHECK_FALSE(report.replicas[0].extinct);
    CHECK(report.replicas[0].final_agents == 2);
  }
  SUBCASE("deterministic and independent of replica scheduling") {
    EvalOptions opt{.reps = 4, .steps = 40, .seed = 9};
    const auto a = evaluate(preset, init_minimal(), opt);
    opt.parallel_replicas = false;
    const auto b = evaluate(preset, init_minimal(), opt);
    for (int r = 0; r < 4; ++r) {
      CHECK(a.replicas[r].total_agents == b.replicas[r].total_agents);
      const auto alone = run_replica(preset, init_minimal(), {}, 40, replica_seed(9, r));
      CHECK(alone.total_agents == a.replicas[r].total_agents);
    }
    CHECK(a.mean_total == b.mean_total);
  }
  SUBCASE("summary statistics") {
    const auto s = summarize({{10, false, 1}, {20, true, 0}, {30, false, 2}, {40, true, 0}});
    CHECK(s.mean_total == 25.0);
    CHECK(s.std_total == doctest::Approx(std::sqrt(125.0)));
    CHECK(s.extinctions == 2);
    CHECK(s.extinction_rate() == 0.5);
  }
}

TEST_CASE("petri runs keep the organism alone") {
  const auto petri = make_petri("pestilence");
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    const auto r = petri_run(random_params(rng, 0.5), petri, 150, i);
    CHECK(r.max_distinct_ids <= 1);
    CHECK(r.trace.size() == 150);
  }
  AgentParams zero{Architecture::Minimal, std::vector<float>(parameter_count(Architecture::Minimal), 0.0f)};
  CHECK(petri_run(zero, petri, 100, 1).n_repro == 0);
}

TEST_CASE("interception changes nothing before the first selection") {
  const auto petri = make_petri("pestilence");
  auto on = make_simulation(petri, init_minimal(), {}, 4, true);
  auto off = make_simulation(petri, init_minimal(), {}, 4, false);
  bool selected = false;
  for (int s = 0; s < 400 && !selected; ++s) {
    REQUIRE(on.env() == off.env());
    selected = on.advance().repro.selected > 0;
    off.advance();
  }
  CHECK(selected);
}

TEST_CASE("meta-evolution plumbing") {
  const auto petri = make_petri("pestilence", 16, 20);
  SUBCASE("no outer steps returns the initial parameters") {
    const auto r = meta_evolve_petri(petri, init_minimal(), {.outer_steps = 0});
    CHECK(r.best == init_minimal());
    CHECK(r.log.empty());
  }
  SUBCASE("short run logs and checkpoints") {
    const auto dir = std::filesystem::temp_directory_path() / "biome_test_meta";
    std::filesystem::remove_all(dir);
    MetaOptions opt{.outer_steps = 2, .seed = 3, .petri_steps = 30, .petri_runs = 1, .out_dir = dir,
                    .checkpoint_every = 1};
    opt.pgpe.population = 4;
    int calls = 0;
    opt.on_step = [&](const MetaLogEntry&) { ++calls; };
    const auto r = meta_evolve_petri(petri, init_minimal(), opt);
    CHECK(calls == 2);
    REQUIRE(r.log.size() == 2);
    CHECK(r.log[1].best_so_far >= r.log[0].best_so_far);
    CHECK(std::filesystem::exists(dir / "log.jsonl"));
    CHECK(std::filesystem::exists(dir / "best_1.params"));
    CHECK(std::filesystem::exists(dir / "center_2.params"));
    CHECK(std::filesystem::exists(dir / "best.params"));
    std::ifstream log(dir / "log.jsonl");
    int lines = 0;
    for (std::string line; std::getline(log, line);) ++lines;
    CHECK(lines == 2);
  }
}
