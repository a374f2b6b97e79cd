#pragma once

#include <string>

#include "supergeo/atlas.hpp"

namespace supergeo {

// Maps a model reference to a model: a registry name ("N11"), a generator
// spec ("pi-grassmannian:1,3" or "grassmannian:1|1,2|2"), or a path to a
// model JSON file.  Unknown names are Usage errors.
SuperManifoldModel resolve_model(const std::string& ref);

// Entry point behind the supergeo executable.  Parses the subcommand, runs
// it, and prints a JSON report (or a {"context", "error"} JSON object on
// failure).  Returns 0 on success, 1 when the computation fails, 2 on usage
// errors.
int run_cli(int argc, char** argv);

}  // namespace supergeo
