#include "biome/io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <set>

namespace biome {

using nlohmann::json;

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

namespace {

constexpr std::uint32_t kParamsMagic = 0x50414342;  // "BCAP"
constexpr std::uint32_t kParamsVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& off) {
  if (off + 4 > in.size()) throw IoError("truncated params file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
  off += 4;
  return v;
}

// Rejects keys the reader does not know, so typos in hand-edited files fail loudly.
void check_keys(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw IoError(std::string(what) + " must be a JSON object");
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw IoError(std::string("unknown key '") + key + "' in " + what);
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

std::vector<std::uint8_t> serialize_params(const AgentParams& params) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + 4 * params.values.size());
  put_u32(out, kParamsMagic);
  put_u32(out, kParamsVersion);
  put_u32(out, static_cast<std::uint32_t>(params.architecture));
  put_u32(out, static_cast<std::uint32_t>(params.values.size()));
  for (float f : params.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

AgentParams deserialize_params(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  if (get_u32(bytes, off) != kParamsMagic) throw IoError("not a params file");
  const auto version = get_u32(bytes, off);
  if (version != kParamsVersion) throw IoError("unsupported params version " + std::to_string(version));
  const auto arch = get_u32(bytes, off);
  if (arch != static_cast<std::uint32_t>(Architecture::Minimal) &&
      arch != static_cast<std::uint32_t>(Architecture::Extended))
    throw IoError("unknown architecture tag " + std::to_string(arch));
  AgentParams p;
  p.architecture = static_cast<Architecture>(arch);
  const auto count = get_u32(bytes, off);
  if (bytes.size() != off + 4ull * count) throw IoError("params file size does not match header");
  p.values.resize(count);
  for (auto& f : p.values) f = std::bit_cast<float>(get_u32(bytes, off));
  check_params(p);
  return p;
}

void save_params(const std::filesystem::path& path, const AgentParams& params) {
  write_bytes(path, serialize_params(params));
}

AgentParams load_params(const std::filesystem::path& path) { return deserialize_params(read_bytes(path)); }

void to_json(json& j, const Nutrients& n) { j = json::array({n.earth, n.air}); }

void from_json(const json& j, Nutrients& n) {
  if (!j.is_array() || j.size() != 2) throw IoError("nutrient pair must be [earth, air]");
  n.earth = j[0].get<double>();
  n.air = j[1].get<double>();
}

void to_json(json& j, const EnvConfig& c) {
  j = json{{"state_size", c.state_size},
           {"max_nutrient_cell", c.max_nutrient_cell},
           {"generator_amount", c.generator_amount},
           {"diffusion_rate", c.diffusion_rate},
           {"diffusion_iterations_per_step", c.diffusion_iterations_per_step},
           {"absorption_amount", c.absorption_amount},
           {"dissipation", c.dissipation},
           {"specialize_cost", c.specialize_cost},
           {"spawn_cost", c.spawn_cost},
           {"reproduce_cost", c.reproduce_cost},
           {"seed_min_nutrient", c.seed_min_nutrient},
           {"max_lifetime", c.max_lifetime},
           {"aging_slope", c.aging_slope},
           {"struct_decay_earth", c.struct_decay_earth},
           {"struct_decay_agent", c.struct_decay_agent},
           {"struct_generation", c.struct_generation},
           {"structural_cap", c.structural_cap},
           {"struct_iterations_per_step", c.struct_iterations_per_step},
           {"max_reproduce_per_step", c.max_reproduce_per_step},
           {"reproduce_min_dist", c.reproduce_min_dist},
           {"reproduce_max_dist", c.reproduce_max_dist},
           {"max_programs", c.max_programs},
           {"reproduction_variation", c.reproduction_variation},
           {"perceive_agent_ids", c.perceive_agent_ids}};
}

void from_json(const json& j, EnvConfig& c) {
  check_keys(j,
             {"state_size", "max_nutrient_cell", "generator_amount", "diffusion_rate",
              "diffusion_iterations_per_step", "absorption_amount", "dissipation", "specialize_cost", "spawn_cost",
              "reproduce_cost", "seed_min_nutrient", "max_lifetime", "aging_slope", "struct_decay_earth",
              "struct_decay_agent", "struct_generation", "structural_cap", "struct_iterations_per_step",
              "max_reproduce_per_step", "reproduce_min_dist", "reproduce_max_dist", "max_programs",
              "reproduction_variation", "perceive_agent_ids"},
             "config");
  get_if(j, "state_size", c.state_size);
  get_if(j, "max_nutrient_cell", c.max_nutrient_cell);
  get_if(j, "generator_amount", c.generator_amount);
  get_if(j, "diffusion_rate", c.diffusion_rate);
  get_if(j, "diffusion_iterations_per_step", c.diffusion_iterations_per_step);
  get_if(j, "absorption_amount", c.absorption_amount);
  get_if(j, "dissipation", c.dissipation);
  get_if(j, "specialize_cost", c.specialize_cost);
  get_if(j, "spawn_cost", c.spawn_cost);
  get_if(j, "reproduce_cost", c.reproduce_cost);
  get_if(j, "seed_min_nutrient", c.seed_min_nutrient);
  get_if(j, "max_lifetime", c.max_lifetime);
  get_if(j, "aging_slope", c.aging_slope);
  get_if(j, "struct_decay_earth", c.struct_decay_earth);
  get_if(j, "struct_decay_agent", c.struct_decay_agent);
  get_if(j, "struct_generation", c.struct_generation);
  get_if(j, "structural_cap", c.structural_cap);
  get_if(j, "struct_iterations_per_step", c.struct_iterations_per_step);
  get_if(j, "max_reproduce_per_step", c.max_reproduce_per_step);
  get_if(j, "reproduce_min_dist", c.reproduce_min_dist);
  get_if(j, "reproduce_max_dist", c.reproduce_max_dist);
  get_if(j, "max_programs", c.max_programs);
  get_if(j, "reproduction_variation", c.reproduction_variation);
  get_if(j, "perceive_agent_ids", c.perceive_agent_ids);
  c.validate();
}

void to_json(json& j, const EnvBlueprint& b) {
  j = json{{"width", b.width}, {"height", b.height}, {"rows", b.rows}, {"seed_columns", b.seed_columns}};
}

void from_json(const json& j, EnvBlueprint& b) {
  check_keys(j, {"width", "height", "rows", "seed_columns"}, "blueprint");
  j.at("rows").get_to(b.rows);
  b.height = j.value("height", static_cast<int>(b.rows.size()));
  b.width = j.value("width", b.rows.empty() ? 0 : static_cast<int>(b.rows.front().size()));
  get_if(j, "seed_columns", b.seed_columns);
}

void to_json(json& j, const MutatorConfig& m) {
  j = json{{"kind", std::string(to_string(m.kind))},
           {"update_prob", m.update_prob},
           {"base_sigma", m.base_sigma},
           {"meta_update_prob", m.meta_update_prob},
           {"meta_sigma", m.meta_sigma}};
}

void from_json(const json& j, MutatorConfig& m) {
  check_keys(j, {"kind", "update_prob", "base_sigma", "meta_update_prob", "meta_sigma"}, "mutator");
  if (j.contains("kind")) m.kind = parse_mutator_kind(j.at("kind").get<std::string>());
  get_if(j, "update_prob", m.update_prob);
  get_if(j, "base_sigma", m.base_sigma);
  get_if(j, "meta_update_prob", m.meta_update_prob);
  get_if(j, "meta_sigma", m.meta_sigma);
  m.validate();
}

void to_json(json& j, const Preset& p) {
  j = json{{"name", p.name}, {"config", p.config}, {"blueprint", p.blueprint}, {"seed_nutrients", p.seed_nutrients},
           {"initial_nutrient", p.initial_nutrient}};
}

void from_json(const json& j, Preset& p) {
  check_keys(j, {"name", "config", "blueprint", "seed_nutrients", "initial_nutrient"}, "preset");
  p.name = j.value("name", std::string("custom"));
  j.at("config").get_to(p.config);
  j.at("blueprint").get_to(p.blueprint);
  get_if(j, "seed_nutrients", p.seed_nutrients);
  get_if(j, "initial_nutrient", p.initial_nutrient);
}

Preset resolve_preset(const std::string& name_or_path, int height, int width) {
  const std::filesystem::path path(name_or_path);
  if (path.extension() == ".json") {
    try {
      return json::parse(read_text(path)).get<Preset>();
    } catch (const json::exception& e) {
      throw IoError("invalid preset file " + path.string() + ": " + e.what());
    }
  }
  return make_preset(name_or_path, height, width);
}

}  // namespace biome
