#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biome/agents.hpp"
#include "biome/config.hpp"
#include "biome/environment.hpp"
#include "biome/mutators.hpp"
#include "biome/presets.hpp"

namespace biome {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Params file: "BCAP" magic, u32 version, u32 architecture, u32 count, then
// count little-endian float32 values.
std::vector<std::uint8_t> serialize_params(const AgentParams& params);
AgentParams deserialize_params(std::span<const std::uint8_t> bytes);
void save_params(const std::filesystem::path& path, const AgentParams& params);
AgentParams load_params(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const Nutrients& n);
void from_json(const nlohmann::json& j, Nutrients& n);
void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);
void to_json(nlohmann::json& j, const EnvBlueprint& b);
void from_json(const nlohmann::json& j, EnvBlueprint& b);
void to_json(nlohmann::json& j, const MutatorConfig& m);
void from_json(const nlohmann::json& j, MutatorConfig& m);
void to_json(nlohmann::json& j, const Preset& p);
void from_json(const nlohmann::json& j, Preset& p);

// A preset name, or a path to a preset JSON file. Sizes apply to names only.
Preset resolve_preset(const std::string& name_or_path, int height = kDefaultHeight, int width = kDefaultWidth);

}  // namespace biome
