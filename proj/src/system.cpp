// SPDX-License-Identifier: Apache-2.0
#include "dfrc/system.hpp"

#include <string>

namespace dfrc {

const char* to_string(Structure s) {
  return s == Structure::fully_connected ? "full" : "partial";
}

Structure structure_from_string(const std::string& s) {
  if (s == "full" || s == "fully_connected") return Structure::fully_connected;
  if (s == "partial" || s == "partially_connected") return Structure::partially_connected;
  throw ConfigError("unknown structure '" + s + "' (expected full|partial)");
}

void SystemConfig::validate() const {
  auto positive = [](Index v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(n_tx, "n_tx");
  positive(n_rx, "n_rx");
  positive(n_rf, "n_rf");
  positive(n_streams, "n_streams");
  positive(n_clusters, "n_clusters");
  positive(n_rays, "n_rays");
  if (n_streams > n_rf) throw ConfigError("n_streams must not exceed n_rf");
  if (n_rf > n_tx) throw ConfigError("n_rf must not exceed n_tx");
}

void SystemConfig::validate(Structure structure) const {
  validate();
  if (structure == Structure::partially_connected && n_tx % n_rf != 0)
    throw ConfigError("partially-connected structure needs n_tx divisible by n_rf");
}

}  // namespace dfrc
