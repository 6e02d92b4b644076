#include <doctest.h>

#include <thread>

#include "biome/http_api.hpp"
#include "biome/service.hpp"

using namespace biome;
using nlohmann::json;

namespace {

SessionConfig quick(std::uint64_t seed = 1) {
  SessionConfig c;
  c.seed = seed;
  c.petri_steps = 30;
  c.frame_every = 10;
  return c;
}

}  // namespace

TEST_CASE("new session offers eight playable candidates") {
  Session s("t", quick(), init_minimal());
  CHECK(s.generation() == 0);
  CHECK(s.state() == Session::State::Choosing);
  REQUIRE(s.candidates().size() == 8);
  for (const auto& c : s.candidates()) {
    CHECK(c.frames.size() >= 3);
    CHECK(c.n_repro >= 0);
    CHECK(c.entry.logic.values.size() == init_minimal().values.size());
  }
}

TEST_CASE("zero sigma candidates are copies of the parent") {
  auto config = quick();
  config.mutator.base_sigma = 0.0;
  Session s("t", config, init_minimal());
  for (const auto& c : s.candidates()) {
    CHECK(c.entry.logic == init_minimal());
    CHECK(c.frames == s.candidates()[0].frames);
  }
}

TEST_CASE("candidates depend only on parent, seed, generation and index") {
  const auto parent = make_root_entry(init_minimal(), {});
  const auto eight = candidate_children(parent, {}, 5, 2, 8);
  const auto four = candidate_children(parent, {}, 5, 2, 4);
  for (int i = 0; i < 4; ++i) CHECK(eight[i] == four[i]);
  CHECK(candidate_children(parent, {}, 5, 3, 1)[0] != eight[0]);
}

TEST_CASE("choices walk the lineage") {
  Session s("t", quick(), init_minimal());
  for (int g = 0; g < 13; ++g) {
    const int pick = (g * 3) % 8;
    const auto chosen = s.candidates()[pick].entry;
    s.choose(pick);
    CHECK(s.parent() == chosen);
    CHECK(s.generation() == g + 1);
  }
  CHECK(s.history().size() == 13);

  const auto before = s.parent();
  CHECK_THROWS_AS(s.choose(8), SessionError);
  CHECK_THROWS_AS(s.choose(-1), SessionError);
  CHECK(s.parent() == before);
  CHECK(s.generation() == 13);
}

TEST_CASE("deploy evaluates the parent and closes the session") {
  Session s("t", quick(), init_minimal());
  const auto& d = s.deploy({.height = 20, .width = 24, .steps = 30, .reps = 2});
  CHECK(d.report.replicas.size() == 2);
  CHECK(d.record.root_params == init_minimal());
  CHECK(replay(d.record).ok());
  CHECK(s.state() == Session::State::Deployed);
  CHECK_THROWS_AS(s.choose(0), SessionError);
  CHECK_THROWS_AS(s.deploy({}), SessionError);
}

TEST_CASE("session manager") {
  SessionManager m;
  const auto a = m.create(quick(1));
  const auto b = m.create(quick(2));
  CHECK(a != b);
  CHECK(m.with_session(a, [](Session& s) { return s.id(); }) == a);
  try {
    m.with_session("nope", [](Session&) { return 0; });
    FAIL("expected not_found");
  } catch (const SessionError& e) {
    CHECK(e.code() == "not_found");
    CHECK(e.status() == 404);
  }
  auto bad = quick();
  bad.preset = "nowhere";
  CHECK_THROWS_AS(m.create(bad), SessionError);
}

TEST_CASE("http api end to end") {
  httplib::Server server;
  SessionManager sessions;
  register_routes(server, sessions);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(120, 0);

  auto res = client.Post("/sessions", R"({"preset": "pestilence", "seed": 3, "petri_steps": 30})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  auto body = json::parse(res->body);
  CHECK(body["version"] == kApiVersion);
  const std::string id = body["session_id"];
  CHECK(body["candidates"].size() == 8);

  res = client.Get("/sessions/" + id + "/candidates/2/frames");
  REQUIRE(res);
  CHECK(res->status == 200);
  body = json::parse(res->body);
  CHECK(body["palette"].size() == kPaletteSize);
  CHECK(body["frames"].size() > 0);
  CHECK(body.contains("n_repro"));

  for (int i = 0; i < 3; ++i) {
    res = client.Post("/sessions/" + id + "/choice", json{{"index", i}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
  }
  body = json::parse(client.Get("/sessions/" + id)->body);
  CHECK(body["generation"] == 3);
  CHECK(body["history"] == json::array({0, 1, 2}));

  res = client.Post("/sessions/" + id + "/choice", R"({"index": 99})", "application/json");
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["code"] == "invalid_index");
  res = client.Post("/sessions/" + id + "/choice", "not json", "application/json");
  CHECK(res->status == 400);
  CHECK(client.Get("/sessions/s999999")->status == 404);
  CHECK(client.Get("/sessions/" + id + "/candidates/x/frames")->status == 400);

  res = client.Post("/sessions/" + id + "/deploy", R"({"height": 20, "width": 24, "steps": 20, "reps": 2})",
                    "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  body = json::parse(res->body);
  CHECK(body["report"]["replicas"].size() == 2);
  CHECK(body["report"].contains("extinction_percent"));
  CHECK(client.Post("/sessions/" + id + "/choice", R"({"index": 0})", "application/json")->status == 409);

  server.stop();
  thread.join();
}
