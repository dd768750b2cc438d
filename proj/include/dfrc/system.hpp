// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfrc/types.hpp"

namespace dfrc {

enum class Structure { fully_connected, partially_connected };

const char* to_string(Structure s);
Structure structure_from_string(const std::string& s);  // "full" | "partial" (and long forms)

/// Array, RF-chain and stream dimensions plus the channel cluster counts.
struct SystemConfig {
  Index n_tx = 32;
  Index n_rx = 6;
  Index n_rf = 16;
  Index n_streams = 6;
  Index n_clusters = 10;
  Index n_rays = 5;

  /// Throws ConfigError when a dimension is non-positive, n_streams <= n_rf <= n_tx
  /// fails, or (for the partial structure) n_rf does not divide n_tx.
  void validate(Structure structure) const;
  void validate() const;

  /// Antennas per RF chain in the partially-connected structure.
  Index block_size() const { return n_tx / n_rf; }
  /// Squared Frobenius radius of F_BB in the partially-connected structure.
  double bb_radius_squared() const {
    return static_cast<double>(n_streams) * static_cast<double>(n_rf) / static_cast<double>(n_tx);
  }
};

}  // namespace dfrc
