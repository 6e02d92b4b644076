#include "biome/http_api.hpp"

#include "biome/io.hpp"

namespace biome {
namespace {

using nlohmann::json;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send(res, status, json{{"version", kApiVersion}, {"code", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw SessionError("bad_request", 400, "request body must be a JSON object");
  return j;
}

// Wraps a handler so that every failure becomes a JSON error response.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const SessionError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

MutatorConfig mutator_from(const json& j) {
  if (!j.contains("mutator")) return {};
  const json& m = j.at("mutator");
  MutatorConfig config;
  if (m.is_string())
    config.kind = parse_mutator_kind(m.get<std::string>());
  else
    m.get_to(config);
  config.validate();
  return config;
}

int index_from(const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw SessionError("invalid_index", 400, "candidate index must be an integer");
}

}  // namespace

void register_routes(httplib::Server& server, SessionManager& sessions) {
  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const json body = parse_body(req);
                SessionConfig config;
                config.preset = body.value("preset", config.preset);
                config.mutator = mutator_from(body);
                config.n_candidates = body.value("n_candidates", config.n_candidates);
                config.seed = body.value("seed", config.seed);
                config.petri_steps = body.value("petri_steps", config.petri_steps);
                const std::string id = sessions.create(config);
                json out = sessions.with_session(id, [](Session& s) { return session_summary(s); });
                send(res, 201, out);
              }));

  server.Get(R"(/sessions/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, sessions.with_session(req.matches[1], [](Session& s) { return session_summary(s); }));
             }));

  server.Get(R"(/sessions/([^/]+)/candidates/([^/]+)/frames)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               const int index = index_from(req.matches[2]);
               send(res, 200,
                    sessions.with_session(req.matches[1], [&](Session& s) { return candidate_payload(s, index); }));
             }));

  server.Post(R"(/sessions/([^/]+)/choice)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const json body = parse_body(req);
                if (!body.contains("index") || !body.at("index").is_number_integer())
                  throw SessionError("invalid_index", 400, "body must contain an integer 'index'");
                const int index = body.at("index").get<int>();
                send(res, 200, sessions.with_session(req.matches[1], [&](Session& s) {
                  s.choose(index);
                  return session_summary(s);
                }));
              }));

  server.Post(R"(/sessions/([^/]+)/deploy)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const json body = parse_body(req);
                DeployRequest request;
                request.preset = body.value("preset", std::string());
                request.width = body.value("width", request.width);
                request.height = body.value("height", request.height);
                request.steps = body.value("steps", request.steps);
                request.reps = body.value("reps", request.reps);
                send(res, 200, sessions.with_session(req.matches[1], [&](Session& s) {
                  const DeployResult& d = s.deploy(request);
                  return json{{"version", kApiVersion},
                              {"session_id", s.id()},
                              {"report", report_json(d.report)},
                              {"record",
                               {{"seed", d.record.seed},
                                {"steps", d.record.steps},
                                {"snapshots", d.record.snapshots.size()}}}};
                }));
              }));
}

}  // namespace biome
