#include <doctest.h>

#include <filesystem>
#include <set>

#include "biome/agents.hpp"
#include "biome/evolve.hpp"
#include "biome/io.hpp"
#include "biome/presets.hpp"
#include "biome/record.hpp"
#include "biome/render.hpp"
#include "support.hpp"

using namespace biome;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("biome_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names == std::vector<std::string>{"persistence", "collaboration", "sideways", "pestilence"});
  for (const auto& name : names) {
    const auto p = make_preset(name, 48, 96);
    CHECK(is_fertile(p.blueprint));
    CHECK(p.blueprint.height == 48);
    CHECK(p.blueprint.width == 96);
    p.config.validate();
    const auto env = seeded_environment(p);
    CHECK(count_agents(env) == 2);
    const auto petri = make_petri(name);
    CHECK(petri.name == name + "-petri");
    CHECK(petri.config == p.config);
    CHECK(petri.blueprint.height == kPetriHeight);
  }
  CHECK(preset_config("sideways") == preset_config("persistence"));
  CHECK(preset_config("persistence").max_lifetime == 10000);
  CHECK(preset_config("pestilence").max_lifetime == 300);
  CHECK(preset_blueprint("sideways", 48, 96) != preset_blueprint("persistence", 48, 96));
  CHECK_THROWS_AS(make_preset("nowhere"), UnknownPreset);
}

TEST_CASE("params file round trip") {
  const auto params = init_minimal();
  CHECK(deserialize_params(serialize_params(params)) == params);
  auto bytes = serialize_params(params);
  bytes.resize(bytes.size() - 4);
  CHECK_THROWS(deserialize_params(bytes));
  const auto dir = scratch("params");
  save_params(dir / "p.params", init_extended());
  CHECK(load_params(dir / "p.params") == init_extended());
  CHECK_THROWS_AS(load_params(dir / "missing.params"), IoError);
}

TEST_CASE("preset json round trip and strictness") {
  const auto preset = make_preset("pestilence", 32, 40);
  const nlohmann::json j = preset;
  const auto back = j.get<Preset>();
  CHECK(back.name == preset.name);
  CHECK(back.config == preset.config);
  CHECK(back.blueprint == preset.blueprint);
  CHECK(back.seed_nutrients == preset.seed_nutrients);
  CHECK(back.initial_nutrient == preset.initial_nutrient);

  nlohmann::json typo = j;
  typo["config"]["dissipaton"] = 1.0;
  CHECK_THROWS(typo.get<Preset>());
  nlohmann::json negative = j;
  negative["config"]["spawn_cost"] = {-1.0, 0.0};
  CHECK_THROWS(negative.get<Preset>());

  const auto dir = scratch("preset");
  write_text(dir / "mine.json", j.dump(2));
  const auto loaded = resolve_preset((dir / "mine.json").string());
  CHECK(loaded.config == preset.config);
  CHECK(resolve_preset("sideways", 20, 30).blueprint.width == 30);
  CHECK_THROWS_AS(resolve_preset("nowhere"), UnknownPreset);
}

TEST_CASE("rendering") {
  const EnvConfig config;
  SUBCASE("all void is one solid colour") {
    Environment env(4, 5, 6);
    const auto img = render_frame(env, config);
    REQUIRE(img.rgb.size() == 4 * 5 * 3);
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
      CHECK(img.rgb[i] == img.rgb[0]);
      CHECK(img.rgb[i + 1] == img.rgb[1]);
      CHECK(img.rgb[i + 2] == img.rgb[2]);
    }
  }
  SUBCASE("rich earth is brighter than empty earth") {
    auto brightness = [](Rgb c) { return c.r + c.g + c.b; };
    const auto& pal = palette();
    CHECK(brightness(pal[palette_index(CellType::Earth, 1.0)]) > brightness(pal[palette_index(CellType::Earth, 0.0)]));
    CHECK(brightness(pal[palette_index(CellType::Air, 1.0)]) > brightness(pal[palette_index(CellType::Air, 0.0)]));
  }
  SUBCASE("palette is stable") {
    // Golden values; any change to the palette has to be deliberate.
    std::uint64_t h = 0;
    for (const auto& c : palette()) h = hash_combine(h, (c.r << 16) | (c.g << 8) | c.b);
    const auto& pal = palette();
    CHECK(pal.size() == kPaletteSize);
    std::set<std::uint32_t> distinct;
    for (const auto& c : pal) distinct.insert((c.r << 16) | (c.g << 8) | c.b);
    CHECK(distinct.size() == pal.size());
    CHECK(h == 0x68fde37dcbbee4edull);
  }
  SUBCASE("png output") {
    const auto env = seeded_environment(make_preset("persistence", 12, 16));
    const auto img = to_image(index_frame(env, config), 3);
    CHECK(img.width == 48);
    CHECK(img.height == 36);
    const auto png = encode_png(img);
    REQUIRE(png.size() > 8);
    CHECK(png[1] == 'P');
    CHECK(png[2] == 'N');
    CHECK(png[3] == 'G');
    const std::vector<Image> frames(5, img);
    const auto strip = filmstrip(frames, 3);
    CHECK(strip.width == 3 * 48 + 2);
    CHECK(strip.height == 2 * 36 + 1);
  }
}

TEST_CASE("run record save, load and replay") {
  const auto preset = make_preset("persistence", 20, 24);
  const auto record = record_run(preset, init_minimal(), {}, 5, 60, 20);
  CHECK(record.stats.size() == 60);
  std::set<int> steps;
  for (const auto& [s, bytes] : record.snapshots) steps.insert(s);
  CHECK(steps == std::set<int>{0, 20, 40, 60});

  const auto dir = scratch("record");
  save_record(dir, record);
  CHECK(fs::exists(dir / "record.json"));
  CHECK(fs::exists(dir / "stats.csv"));
  const auto loaded = load_record(dir);
  CHECK(loaded.snapshots == record.snapshots);
  CHECK(loaded.root_params == record.root_params);
  CHECK(loaded.preset.config == record.preset.config);

  const auto report = replay(loaded);
  CHECK(report.ok());
  CHECK(report.snapshots_checked == 4);

  auto tampered = loaded;
  tampered.snapshots[40].back() ^= 1;
  const auto bad = replay(tampered);
  CHECK_FALSE(bad.ok());
  CHECK(bad.mismatched_steps == std::vector<int>{40});
}
