// Command-line front end: run, eval, meta, replay, serve, presets.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "biome/evolve.hpp"
#include "biome/http_api.hpp"
#include "biome/io.hpp"
#include "biome/record.hpp"
#include "biome/render.hpp"

namespace fs = std::filesystem;
using namespace biome;

namespace {

struct CommonArgs {
  std::string preset = "persistence";
  int width = kDefaultWidth;
  int height = kDefaultHeight;
  int steps = 1000;
  std::uint64_t seed = 0;
  std::string params;
  std::string logic = "minimal";
  std::string mutator = "basic";
  double sigma = -1.0;
  std::string backend = "serial";
};

void add_world(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--preset", a.preset, "Preset name or preset JSON file");
  cmd->add_option("--width", a.width, "World width");
  cmd->add_option("--height", a.height, "World height");
  cmd->add_option("--steps", a.steps, "Steps per run");
  cmd->add_option("--seed", a.seed, "RNG seed");
}

void add_agent(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--params", a.params, "Agent params file (default: hand-designed init)");
  cmd->add_option("--logic", a.logic, "Init architecture when no params file is given")
      ->check(CLI::IsMember({"minimal", "extended"}));
  cmd->add_option("--mutator", a.mutator, "Mutator kind")->check(CLI::IsMember({"basic", "adaptive"}));
  cmd->add_option("--sigma", a.sigma, "Mutator base sigma (default 0.01 minimal, 0.001 extended)");
}

AgentParams agent_params(const CommonArgs& a) {
  if (!a.params.empty()) return load_params(a.params);
  return parse_architecture(a.logic) == Architecture::Extended ? init_extended() : init_minimal();
}

MutatorConfig mutator_config(const CommonArgs& a, const AgentParams& p) {
  MutatorConfig m;
  m.kind = parse_mutator_kind(a.mutator);
  m.base_sigma = a.sigma > 0 ? a.sigma : (p.architecture == Architecture::Extended ? 0.001 : 0.01);
  m.validate();
  return m;
}

int cmd_run(const CommonArgs& a, const std::string& out_dir, int snapshot_every, int scale) {
  const Preset preset = resolve_preset(a.preset, a.height, a.width);
  const AgentParams params = agent_params(a);
  const MutatorConfig mutator = mutator_config(a, params);
  const RunRecord rec = record_run(preset, params, mutator, a.seed, a.steps, snapshot_every, parse_backend(a.backend));
  save_record(out_dir, rec);

  std::vector<Image> frames;
  for (const auto& [step, bytes] : rec.snapshots) frames.push_back(render_frame(deserialize(bytes), preset.config, scale));
  write_png(fs::path(out_dir) / "frames.png", filmstrip(frames, 5));
  write_png(fs::path(out_dir) / "final.png", frames.back());

  const auto& last = rec.stats.empty() ? StepStats{} : rec.stats.back();
  std::printf("%s: %d steps, %d agents at the end, %zu snapshots written to %s\n", preset.name.c_str(), a.steps,
              last.n_agents, rec.snapshots.size(), out_dir.c_str());
  return 0;
}

int cmd_eval(const CommonArgs& a, int reps) {
  const AgentParams params = agent_params(a);
  const MutatorConfig mutator = mutator_config(a, params);
  std::vector<std::string> names;
  if (a.preset == "all")
    names = preset_names();
  else
    names = {a.preset};
  std::printf("%-14s %-9s %-9s %26s %12s\n", "configuration", "logic", "mutator", "total agents", "extinction %");
  for (const auto& name : names) {
    const Preset preset = resolve_preset(name, a.height, a.width);
    EvalOptions o;
    o.reps = reps;
    o.steps = a.steps;
    o.seed = a.seed;
    o.mutator = mutator;
    o.backend = parse_backend(a.backend);
    const EvalReport r = evaluate(preset, params, o);
    char total[64];
    std::snprintf(total, sizeof(total), "%.0f +- %.0f", r.mean_total, r.std_total);
    std::printf("%-14s %-9s %-9s %26s %12.2f\n", preset.name.c_str(), std::string(to_string(params.architecture)).c_str(),
                std::string(to_string(mutator.kind)).c_str(), total, 100.0 * r.extinction_rate());
  }
  return 0;
}

int cmd_meta(const CommonArgs& a, const std::string& mode, MetaOptions o, int pop, const std::string& out_dir) {
  const AgentParams init = agent_params(a);
  o.mutator = mutator_config(a, init);
  o.seed = a.seed;
  o.pgpe.population = pop;
  o.inner_steps = a.steps;
  if (!out_dir.empty()) o.out_dir = out_dir;
  o.on_step = [](const MetaLogEntry& e) {
    std::printf("outer %3d  best %.1f  best so far %.1f  mean %.1f  (%.1fs)\n", e.outer_step, e.best_fitness,
                e.best_so_far, e.mean_fitness, e.wall_time);
    std::fflush(stdout);
  };
  MetaResult r;
  if (mode == "e2e") {
    r = meta_evolve_e2e(resolve_preset(a.preset, a.height, a.width), init, o);
  } else {
    const Preset base = resolve_preset(a.preset, kPetriHeight, kPetriWidth);
    r = meta_evolve_petri(base.blueprint.height == kPetriHeight ? base : make_petri(a.preset), init, o);
  }
  std::printf("best fitness %.1f\n", r.best_fitness);
  if (out_dir.empty()) std::printf("no --out-dir given; best params not saved\n");
  return 0;
}

int cmd_replay(const std::string& dir, const std::string& backend) {
  const RunRecord rec = load_record(dir);
  const ReplayReport report = replay(rec, parse_backend(backend));
  if (report.ok()) {
    std::printf("replay ok: %d snapshots identical over %d steps\n", report.snapshots_checked, rec.steps);
    return 0;
  }
  std::printf("replay DIVERGED: %zu of %d snapshots differ (first at step %d)\n", report.mismatched_steps.size(),
              report.snapshots_checked, report.mismatched_steps.empty() ? -1 : report.mismatched_steps.front());
  return 1;
}

int cmd_serve(const std::string& host, int port) {
  SessionManager sessions;
  httplib::Server server;
  register_routes(server, sessions);
  std::printf("listening on http://%s:%d\n", host.c_str(), port);
  std::fflush(stdout);
  return server.listen(host, port) ? 0 : 1;
}

int cmd_presets(const std::string& out_dir, int height, int width) {
  fs::create_directories(out_dir);
  for (const auto& name : preset_names()) {
    const nlohmann::json j = make_preset(name, height, width);
    write_text(fs::path(out_dir) / (name + ".json"), j.dump(2) + "\n");
  }
  std::printf("wrote %zu presets to %s\n", preset_names().size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular-automata biome simulator and meta-evolution toolkit"};
  app.require_subcommand(1);

  CommonArgs run_args, eval_args, meta_args;

  auto* run = app.add_subcommand("run", "Simulate one world and write a run record, stats and frames");
  add_world(run, run_args);
  add_agent(run, run_args);
  std::string run_out = "run_out";
  int snapshot_every = 100, scale = 4;
  run->add_option("--out-dir", run_out, "Output directory");
  run->add_option("--snapshot-every", snapshot_every, "Snapshot period in steps")->check(CLI::PositiveNumber);
  run->add_option("--scale", scale, "Pixels per cell in rendered frames")->check(CLI::Range(1, 32));
  run->add_option("--backend", run_args.backend, "Kernel backend")->check(CLI::IsMember({"serial", "openmp"}));

  auto* eval = app.add_subcommand("eval", "Evaluate agent logic and mutator over replicas");
  add_world(eval, eval_args);
  eval_args.width = 96;
  eval_args.height = 48;
  add_agent(eval, eval_args);
  int reps = 16;
  eval->add_option("--reps", reps, "Replicas")->check(CLI::NonNegativeNumber);
  eval->add_option("--backend", eval_args.backend, "Kernel backend")->check(CLI::IsMember({"serial", "openmp"}));

  auto* meta = app.add_subcommand("meta", "Meta-evolve agent parameters with PGPE");
  add_world(meta, meta_args);
  meta_args.preset = "pestilence";
  meta_args.width = 96;
  meta_args.height = 48;
  add_agent(meta, meta_args);
  std::string mode = "petri", meta_out;
  int pop = 32;
  MetaOptions meta_options;
  meta->add_option("--mode", mode, "e2e or petri")->check(CLI::IsMember({"e2e", "petri"}));
  meta->add_option("--outer", meta_options.outer_steps, "Outer steps")->check(CLI::NonNegativeNumber);
  meta->add_option("--pop", pop, "Population size (even)")->check(CLI::PositiveNumber);
  meta->add_option("--petri-steps", meta_options.petri_steps, "Steps of each Petri run");
  meta->add_option("--petri-runs", meta_options.petri_runs, "Petri runs per candidate");
  meta->add_option("--lambda", meta_options.petri_lambda, "Petri reward per successful reproduction");
  meta->add_option("--center-lr", meta_options.pgpe.center_lr, "PGPE centre learning rate");
  meta->add_option("--init-std", meta_options.pgpe.init_std, "PGPE initial standard deviation");
  meta->add_option("--checkpoint-every", meta_options.checkpoint_every, "Checkpoint period in outer steps");
  meta->add_option("--out-dir", meta_out, "Directory for log.jsonl and checkpoints");

  auto* rep = app.add_subcommand("replay", "Verify that a run record replays bit-exactly");
  std::string record_dir, replay_backend = "serial";
  rep->add_option("record", record_dir, "Run record directory")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--backend", replay_backend, "Kernel backend")->check(CLI::IsMember({"serial", "openmp"}));

  auto* serve = app.add_subcommand("serve", "Serve the interactive evolution HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  auto* presets = app.add_subcommand("presets", "Write the named presets as editable JSON files");
  std::string presets_out = "presets";
  int presets_h = kDefaultHeight, presets_w = kDefaultWidth;
  presets->add_option("--out-dir", presets_out, "Output directory");
  presets->add_option("--height", presets_h, "World height");
  presets->add_option("--width", presets_w, "World width");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args, run_out, snapshot_every, scale);
    if (*eval) return cmd_eval(eval_args, reps);
    if (*meta) return cmd_meta(meta_args, mode, meta_options, pop, meta_out);
    if (*rep) return cmd_replay(record_dir, replay_backend);
    if (*serve) return cmd_serve(host, port);
    if (*presets) return cmd_presets(presets_out, presets_h, presets_w);
  } catch (const UnknownPreset& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
