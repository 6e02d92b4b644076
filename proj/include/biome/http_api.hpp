#pragma once

#include <httplib.h>

#include "biome/service.hpp"

namespace biome {

// Routes:
//   POST /sessions                             {preset, mutator, n_candidates, seed}
//   GET  /sessions/{id}
//   GET  /sessions/{id}/candidates/{i}/frames
//   POST /sessions/{id}/choice                 {index}
//   POST /sessions/{id}/deploy                 {preset, width, height, steps, reps}
// Every response carries "version"; errors are {version, code, message}.
void register_routes(httplib::Server& server, SessionManager& sessions);

}  // namespace biome
