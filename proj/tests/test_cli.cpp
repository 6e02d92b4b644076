#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "biome/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(BIOME_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("biome_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli run then replay") {
  const auto dir = scratch("run");
  auto r = cli("run --preset persistence --height 20 --width 24 --steps 40 --snapshot-every 10 --out-dir " + dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "record.json"));
  CHECK(fs::exists(dir / "frames.png"));
  CHECK(fs::exists(dir / "stats.csv"));
  r = cli("replay " + dir.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("replay ok") != std::string::npos);

  // Corrupt one snapshot: replay must notice.
  auto snap = dir / "snapshots" / "step_000020.bin";
  auto bytes = biome::read_bytes(snap);
  bytes.back() ^= 0x40;
  biome::write_bytes(snap, bytes);
  r = cli("replay " + dir.string());
  CHECK(r.code != 0);
  CHECK(r.out.find("DIVERGED") != std::string::npos);
}

TEST_CASE("cli eval") {
  auto r = cli("eval --preset persistence --height 20 --width 24 --reps 1 --steps 0");
  CHECK(r.code == 0);
  CHECK(r.out.find("persistence") != std::string::npos);
  CHECK(r.out.find("0.00") != std::string::npos);
}

TEST_CASE("cli errors") {
  CHECK(cli("eval --preset nowhere --steps 1 --reps 1").code != 0);
  CHECK(cli("eval --preset persistence --params /nonexistent/p.params --steps 1 --reps 1").code != 0);
  CHECK(cli("frobnicate").code != 0);
  CHECK(cli("").code != 0);
}

TEST_CASE("cli presets") {
  const auto dir = scratch("presets");
  auto r = cli("presets --out-dir " + dir.string());
  CHECK(r.code == 0);
  for (const char* name : {"persistence", "collaboration", "sideways", "pestilence"})
    CHECK(fs::exists(dir / (std::string(name) + ".json")));
  r = cli("eval --preset " + (dir / "pestilence.json").string() + " --reps 1 --steps 5");
  CHECK(r.code == 0);
}
