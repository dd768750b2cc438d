// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "dfrc/beamformer.hpp"
#include "dfrc/manifold.hpp"
#include "dfrc/objective.hpp"

namespace dfrc {

struct ArmijoConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;
  /// Start each search from the exact minimizer of the (unretracted) quadratic
  /// along the search direction instead of `initial_step`.
  bool quadratic_hint = true;  // first trial step from the second-order model along the direction
};

struct RcgConfig {
  int k_max = 100;
  double grad_tol = 1e-8;  // eta
  ArmijoConfig armijo;

  void validate() const;
};

enum class RcgStatus { converged, max_iterations, line_search_failed };

struct RcgTrace {
  std::vector<double> objective;  // g after every accepted step (first entry: initial point)
  std::vector<double> grad_norm;
  int iterations = 0;
  RcgStatus status = RcgStatus::converged;
};

struct RcgResult {
  CirclePoint f_rf;
  RcgTrace trace;
};

/// Riemannian conjugate gradient (Polak-Ribiere+, Armijo backtracking) for
/// min ||F_target - F_RF F_BB||_F^2 over unit-modulus F_RF.
RcgResult rcg_solve(const CMatrix& f_target, const CMatrix& f_bb, const CirclePoint& init, const RcgConfig& cfg);

struct MadmmConfig {
  double alpha0 = 1.0;
  double beta = 2.0;
  double gamma = 10.0;
  int n_max = 200;
  RcgConfig rcg;
  double primal_tol = 1e-6;

  void validate() const;
};

struct MadmmState {
  CMatrix f;          // consensus variable, ||F||_F^2 = N_s
  CirclePoint f_rf;
  CMatrix f_bb;
  CMatrix lambda;     // scaled dual
  double alpha = 1.0;
  int iter = 0;

  /// Random-phase F_RF from the seed, F_BB fitted to F_com, F = F_RF F_BB at
  /// full power, zero dual.
  static MadmmState initial(const ReferencePair& refs, Index n_rf, std::uint64_t seed, double alpha0);
  /// Same, from a caller-provided analog matrix.
  static MadmmState from_analog(const ReferencePair& refs, const CirclePoint& f_rf, double alpha0);
};

/// sqrt(N_s) Fbar / ||Fbar||_F with Fbar = 2 phi F_com + 2 (1 - phi) F_rad - Lambda + alpha F_RF F_BB.
CMatrix f_update(const MadmmState& state, const ReferencePair& refs, double phi);

/// Least squares (F_RF^H F_RF)^{-1} F_RF^H F_target, ridge-regularized when the
/// normal matrix has condition number above 1e12.
CMatrix fbb_update(const CMatrix& f_rf, const CMatrix& f_target);

/// beta alpha if r > gamma, alpha / beta if r < 1/gamma, else alpha; r = primal_res / dual_delta.
double penalty_update(double alpha, double primal_res, double dual_delta, double beta, double gamma);

/// Full consensus-ADMM loop for the fully-connected structure.
SolveResult madmm_solve(const ReferencePair& refs, double phi, const MadmmConfig& cfg, MadmmState init);

}  // namespace dfrc
