// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dfrc/system.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

struct HybridBeamformer {
  Structure structure = Structure::fully_connected;
  CMatrix f_rf;  // n_tx x n_rf
  CMatrix f_bb;  // n_rf x n_streams

  Index n_tx() const { return f_rf.rows(); }
  Index n_rf() const { return f_rf.cols(); }
  Index n_streams() const { return f_bb.cols(); }
};

struct Violation {
  std::string constraint;  // "shape", "unit_modulus", "off_block_zero", "power"
  std::string detail;
  double value = 0.0;   // offending modulus, stray magnitude, or power ratio
  double excess = 0.0;  // distance from the feasible value
};

/// Lists every violated feasibility invariant; empty iff the beamformer is feasible.
std::vector<Violation> validate(const HybridBeamformer& b);

/// F_RF F_BB after checking feasibility; throws NumericalError naming the worst violation.
CMatrix effective_precoder(const HybridBeamformer& b);

std::string to_json(const HybridBeamformer& b, int indent = 2);
/// Throws IoError on malformed input.
HybridBeamformer beamformer_from_json(const std::string& text);

}  // namespace dfrc

namespace dfrc {

/// Per-iteration traces shared by both solvers.
struct SolverReport {
  std::vector<double> objective_trace;        // trade-off objective per outer iteration
  std::vector<double> primal_residual_trace;  // ||F - F_RF F_BB||_F (consensus solver only)
  std::vector<double> grad_norm_trace;        // Riemannian gradient norm
  int iterations = 0;
  double wall_ms = 0.0;
  std::string status;  // "converged", "max_iterations", ...
};

struct SolveResult {
  HybridBeamformer beamformer;
  SolverReport report;
};

}  // namespace dfrc
