#include "biome/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "biome/io.hpp"

namespace biome {

EvalReport summarize(std::vector<ReplicaResult> replicas) {
  EvalReport r;
  r.replicas = std::move(replicas);
  const double n = static_cast<double>(r.replicas.size());
  if (r.replicas.empty()) return r;
  double sum = 0.0;
  for (const auto& rep : r.replicas) {
    sum += static_cast<double>(rep.total_agents);
    if (rep.extinct) ++r.extinctions;
  }
  r.mean_total = sum / n;
  double sq = 0.0;
  for (const auto& rep : r.replicas) {
    const double d = static_cast<double>(rep.total_agents) - r.mean_total;
    sq += d * d;
  }
  r.std_total = std::sqrt(sq / n);
  return r;
}

std::uint64_t replica_seed(std::uint64_t seed, int rep) {
  return hash_combine(seed, 0x5EED0000ull + static_cast<std::uint64_t>(rep));
}

Simulation make_simulation(const Preset& preset, const AgentParams& params, const MutatorConfig& mutator,
                           std::uint64_t seed, bool intercept, Backend backend) {
  check_params(params);
  ProgramStore store(preset.config.max_programs);
  const AgentId id = store.insert(make_root_entry(params, mutator));
  Environment env = seeded_environment(preset, id);
  StepOptions options;
  options.backend = backend;
  options.mutator = mutator;
  options.intercept = intercept;
  return Simulation(std::move(env), std::move(store), preset.config, seed, options);
}

ReplicaResult run_replica(const Preset& preset, const AgentParams& params, const MutatorConfig& mutator, int steps,
                          std::uint64_t seed, Backend backend, const StepObserver& observer) {
  Simulation sim = make_simulation(preset, params, mutator, seed, false, backend);
  ReplicaResult r;
  r.final_agents = count_agents(sim.env());
  for (int s = 0; s < steps; ++s) {
    const StepStats& st = sim.advance();
    if (observer) observer(sim);
    r.total_agents += st.n_agents;
    r.final_agents = st.n_agents;
    if (st.n_agents == 0) break;
  }
  r.extinct = r.final_agents == 0;
  return r;
}

namespace {

// Runs fn(i) for i in [0, n), optionally on OpenMP threads, and rethrows the
// first exception on the calling thread.
template <typename Fn>
void parallel_for(int n, bool parallel, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(biome_parallel_for_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

EvalReport evaluate(const Preset& preset, const AgentParams& params, const EvalOptions& options) {
  if (options.reps < 0 || options.steps < 0) throw std::invalid_argument("reps and steps must be >= 0");
  std::vector<ReplicaResult> results(options.reps);
  parallel_for(options.reps, options.parallel_replicas, [&](int rep) {
    results[rep] = run_replica(preset, params, options.mutator, options.steps, replica_seed(options.seed, rep),
                               options.backend);
  });
  return summarize(std::move(results));
}

double fitness(double total_agents, bool extinct, double death_penalty) {
  return total_agents - (extinct ? death_penalty : 0.0);
}

PgpeState pgpe_init(std::vector<double> center, const PgpeConfig& config) {
  PgpeState s;
  const auto n = center.size();
  s.center = std::move(center);
  s.stdev.assign(n, config.init_std);
  s.adam_m.assign(n, 0.0);
  s.adam_v.assign(n, 0.0);
  return s;
}

PgpeSamples pgpe_ask(const PgpeState& state, const PgpeConfig& config, Rng& rng) {
  if (config.population <= 0 || config.population % 2 != 0)
    throw std::invalid_argument("PGPE population must be a positive even number");
  const int pairs = config.population / 2;
  const std::size_t dim = state.center.size();
  PgpeSamples s;
  s.noise.resize(pairs);
  s.params.resize(config.population);
  for (int i = 0; i < pairs; ++i) {
    auto& eps = s.noise[i];
    eps.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) eps[d] = state.stdev[d] * rng.normal();
    auto& plus = s.params[2 * i];
    auto& minus = s.params[2 * i + 1];
    plus.resize(dim);
    minus.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      plus[d] = state.center[d] + eps[d];
      minus[d] = state.center[d] - eps[d];
    }
  }
  return s;
}

std::vector<double> centered_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> ranks(n, 0.0);
  if (n < 2) return ranks;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg / static_cast<double>(n - 1) - 0.5;
    i = j;
  }
  return ranks;
}

PgpeState pgpe_step(PgpeState state, std::span<const double> fitnesses, const PgpeSamples& samples,
                    const PgpeConfig& config) {
  const std::size_t pop = samples.params.size();
  const std::size_t pairs = samples.noise.size();
  if (fitnesses.size() != pop || pop != 2 * pairs) throw std::invalid_argument("PGPE: population size mismatch");
  const std::size_t dim = state.center.size();
  ++state.steps;

  const auto ranks = centered_ranks(fitnesses);
  if (std::all_of(ranks.begin(), ranks.end(), [](double r) { return r == 0.0; })) return state;
  const double baseline = std::accumulate(ranks.begin(), ranks.end(), 0.0) / static_cast<double>(pop);

  std::vector<double> grad_center(dim, 0.0), grad_std(dim, 0.0);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double diff = (ranks[2 * i] - ranks[2 * i + 1]) * 0.5;
    const double avg = (ranks[2 * i] + ranks[2 * i + 1]) * 0.5 - baseline;
    const auto& eps = samples.noise[i];
    for (std::size_t d = 0; d < dim; ++d) {
      grad_center[d] += eps[d] * diff;
      const double s = state.stdev[d];
      grad_std[d] += avg * (eps[d] * eps[d] - s * s) / s;
    }
  }

  const double t = state.steps;
  const double c1 = 1.0 - std::pow(config.adam_beta1, t);
  const double c2 = 1.0 - std::pow(config.adam_beta2, t);
  for (std::size_t d = 0; d < dim; ++d) {
    const double g = grad_center[d] / static_cast<double>(pairs);
    state.adam_m[d] = config.adam_beta1 * state.adam_m[d] + (1.0 - config.adam_beta1) * g;
    state.adam_v[d] = config.adam_beta2 * state.adam_v[d] + (1.0 - config.adam_beta2) * g * g;
    const double mhat = state.adam_m[d] / c1;
    const double vhat = state.adam_v[d] / c2;
    state.center[d] += config.center_lr * mhat / (std::sqrt(vhat) + config.adam_eps);

    const double s = state.stdev[d];
    const double allowed = std::abs(s) * config.max_std_change;
    const double proposed = s + config.std_lr * grad_std[d] / static_cast<double>(pairs);
    state.stdev[d] = std::clamp(proposed, s - allowed, s + allowed);
  }
  return state;
}

PetriResult petri_run(const AgentParams& params, const Preset& petri, int n_steps, std::uint64_t seed,
                      const MutatorConfig& mutator, bool intercept) {
  Simulation sim = make_simulation(petri, params, mutator, seed, intercept);
  PetriResult r;
  r.trace.reserve(n_steps);
  r.max_distinct_ids = static_cast<int>(distinct_agent_ids(sim.env()).size());
  for (int s = 0; s < n_steps; ++s) {
    const StepStats& st = sim.advance();
    r.trace.push_back(st.n_agents);
    r.n_repro += st.n_repro_success;
    if (st.repro.selected > 0 && !r.first_selection_step) r.first_selection_step = s;
    r.max_distinct_ids = std::max(r.max_distinct_ids, static_cast<int>(distinct_agent_ids(sim.env()).size()));
  }
  return r;
}

double petri_fitness(std::span<const int> trace, int n_repro, int target, double lambda) {
  double error = 0.0;
  for (int c : trace) error += std::abs(c - target);
  return -error + lambda * n_repro;
}

double e2e_candidate_fitness(const Preset& preset, const AgentParams& params, const MetaOptions& options,
                             std::uint64_t seed) {
  const auto r = run_replica(preset, params, options.mutator, options.inner_steps, seed);
  return fitness(static_cast<double>(r.total_agents), r.extinct);
}

double petri_candidate_fitness(const Preset& petri, const AgentParams& params, const MetaOptions& options,
                               std::uint64_t seed) {
  const int runs = std::max(1, options.petri_runs);
  double total = 0.0;
  for (int i = 0; i < runs; ++i) {
    const auto r = petri_run(params, petri, options.petri_steps, replica_seed(seed, i), options.mutator);
    total += petri_fitness(r.trace, r.n_repro, options.petri_target, options.petri_lambda);
  }
  return total / runs;
}

namespace {

using CandidateFitness = std::function<double(const AgentParams&, std::uint64_t)>;

AgentParams to_params(Architecture arch, const std::vector<double>& values) {
  AgentParams p{arch, std::vector<float>(values.size())};
  for (std::size_t i = 0; i < values.size(); ++i) p.values[i] = static_cast<float>(values[i]);
  return p;
}

MetaResult meta_loop(const AgentParams& init, const MetaOptions& options, const CandidateFitness& evaluate_one) {
  check_params(init);
  const auto start = std::chrono::steady_clock::now();
  std::ofstream log;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    log.open(*options.out_dir / "log.jsonl");
    if (!log) throw IoError("cannot write training log");
  }

  MetaResult result;
  result.best = init;
  auto generation_seed = [&](int g) {
    return hash_combine(options.seed, 0xE0E0ull + (options.common_seeds ? 0 : static_cast<std::uint64_t>(g)));
  };
  result.best_fitness = evaluate_one(init, generation_seed(0));
  if (options.outer_steps <= 0) return result;

  PgpeState state = pgpe_init({init.values.begin(), init.values.end()}, options.pgpe);
  Rng rng(hash_combine(options.seed, 0x96E5ull));
  for (int g = 0; g < options.outer_steps; ++g) {
    const auto samples = pgpe_ask(state, options.pgpe, rng);
    const int pop = static_cast<int>(samples.params.size());
    std::vector<AgentParams> candidates;
    candidates.reserve(pop);
    for (const auto& v : samples.params) candidates.push_back(to_params(init.architecture, v));
    std::vector<double> fit(pop);
    const auto seed = generation_seed(g);
    parallel_for(pop, options.parallel, [&](int i) { fit[i] = evaluate_one(candidates[i], seed); });

    MetaLogEntry entry;
    entry.outer_step = g;
    const auto best_it = std::max_element(fit.begin(), fit.end());
    entry.best_fitness = *best_it;
    entry.mean_fitness = std::accumulate(fit.begin(), fit.end(), 0.0) / pop;
    if (*best_it > result.best_fitness) {
      result.best_fitness = *best_it;
      result.best = candidates[best_it - fit.begin()];
    }
    entry.best_so_far = result.best_fitness;
    entry.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    state = pgpe_step(std::move(state), fit, samples, options.pgpe);
    result.log.push_back(entry);

    if (log.is_open()) {
      log << nlohmann::json{{"outer_step", entry.outer_step},
                            {"best_fitness", entry.best_fitness},
                            {"best_so_far", entry.best_so_far},
                            {"mean_fitness", entry.mean_fitness},
                            {"wall_time", entry.wall_time}}
                 .dump()
          << '\n';
      log.flush();
      const bool last = g + 1 == options.outer_steps;
      if (last || (options.checkpoint_every > 0 && (g + 1) % options.checkpoint_every == 0)) {
        save_params(*options.out_dir / ("best_" + std::to_string(g + 1) + ".params"), result.best);
        save_params(*options.out_dir / ("center_" + std::to_string(g + 1) + ".params"),
                    to_params(init.architecture, state.center));
      }
    }
    if (options.on_step) options.on_step(entry);
  }
  if (options.out_dir) save_params(*options.out_dir / "best.params", result.best);
  return result;
}

}  // namespace

MetaResult meta_evolve_e2e(const Preset& preset, const AgentParams& init, const MetaOptions& options) {
  return meta_loop(init, options, [&](const AgentParams& p, std::uint64_t seed) {
    return e2e_candidate_fitness(preset, p, options, seed);
  });
}

MetaResult meta_evolve_petri(const Preset& petri, const AgentParams& init, const MetaOptions& options) {
  return meta_loop(init, options, [&](const AgentParams& p, std::uint64_t seed) {
    return petri_candidate_fitness(petri, p, options, seed);
  });
}

}  // namespace biome
