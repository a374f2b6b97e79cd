#pragma once

#include <string>
#include <vector>

#include "supergeo/atlas.hpp"

namespace supergeo {

// Built-in models, all two-chart circle-style atlases or products of them.
// Unknown names are Usage errors.  Grassmannian models are generated on
// demand elsewhere and are not part of this fixed list.
std::vector<std::string> registry_names();
SuperManifoldModel registry_model(const std::string& name);

// R^{1|0} as a single-chart model; the homotopy parameter lives here.
SuperManifoldModel line_model();

}  // namespace supergeo
