// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used only by the tests. None of these
// call into the solvers they check.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "dfrc/channel.hpp"
#include "dfrc/objective.hpp"
#include "dfrc/rng.hpp"
#include "dfrc/scene.hpp"

namespace oracle {

using dfrc::CMatrix;
using dfrc::cdouble;
using dfrc::Index;

inline CMatrix random_circle(dfrc::Rng& rng, Index r, Index c) { return rng.unit_phase(r, c); }

inline CMatrix random_sphere(dfrc::Rng& rng, Index r, Index c, double radius) {
  CMatrix m = rng.complex_normal(r, c);
  return (radius / m.norm()) * m;
}

/// Integral of a(theta) a(theta)^H over the full half-plane [-pi/2, pi/2]:
/// (pi / n) J0(pi (m - k)).
inline CMatrix full_domain_integral(Index n) {
  CMatrix a(n, n);
  for (Index m = 0; m < n; ++m)
    for (Index k = 0; k < n; ++k)
      a(m, k) = std::numbers::pi / static_cast<double>(n) *
                std::cyl_bessel_j(0.0, std::numbers::pi * static_cast<double>(std::abs(m - k)));
  return a;
}

/// Brute force over unit-modulus 2x2 analog matrices (column gauge fixed so the
/// first row is 1) with, per grid point, the best power-normalized precoder in
/// the range of F_RF. Returns the smallest trade-off objective found.
inline double madmm_tiny_brute_force(const dfrc::ReferencePair& refs, double phi, int grid) {
  const CMatrix t = refs.blend(phi);  // 2 x 1
  const double ns = static_cast<double>(refs.n_streams());
  double best = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia < grid; ++ia) {
    const cdouble ea = std::polar(1.0, 2.0 * std::numbers::pi * ia / grid);
    for (int ib = 0; ib < grid; ++ib) {
      const cdouble eb = std::polar(1.0, 2.0 * std::numbers::pi * ib / grid);
      CMatrix f_rf(2, 2);
      f_rf << 1.0, 1.0, ea, eb;
      // Orthogonal projection of the blended target onto range(F_RF).
      CMatrix proj;
      const double det = std::abs(eb - ea);
      if (det > 1e-12) {
        proj = t;
      } else {
        const CMatrix u = f_rf.col(0) / f_rf.col(0).norm();
        proj = u * (u.adjoint() * t);
      }
      const double n = proj.norm();
      if (!(n > 0.0)) continue;
      const CMatrix f = (std::sqrt(ns) / n) * proj;
      best = std::min(best, dfrc::weighted_objective(f, refs, phi));
    }
  }
  return best;
}

/// Brute force for N_t = 2, N_RF = 1, N_s = 1: both phases on a grid and the
/// fixed-modulus scalar F_BB = +-sqrt(N_s N_RF / N_t).
inline double rpmtr_tiny_brute_force(const dfrc::ReferencePair& refs, double phi, int grid) {
  const double r = std::sqrt(0.5);
  double best = std::numeric_limits<double>::infinity();
  CMatrix f(2, 1);
  for (int ia = 0; ia < grid; ++ia) {
    const cdouble ea = std::polar(1.0, 2.0 * std::numbers::pi * ia / grid);
    for (int ib = 0; ib < grid; ++ib) {
      const cdouble eb = std::polar(1.0, 2.0 * std::numbers::pi * ib / grid);
      for (double s : {r, -r}) {
        f(0, 0) = s * ea;
        f(1, 0) = s * eb;
        best = std::min(best, dfrc::weighted_objective(f, refs, phi));
      }
    }
  }
  return best;
}

/// min over unit-modulus x in C^{2x1} of ||T - x b||^2 on a phase grid.
inline double rcg_tiny_brute_force(const CMatrix& target, const CMatrix& b, int grid) {
  double best = std::numeric_limits<double>::infinity();
  CMatrix x(2, 1);
  for (int ia = 0; ia < grid; ++ia) {
    x(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi * ia / grid);
    for (int ib = 0; ib < grid; ++ib) {
      x(1, 0) = std::polar(1.0, 2.0 * std::numbers::pi * ib / grid);
      best = std::min(best, (target - x * b).squaredNorm());
    }
  }
  return best;
}

/// Small fixed instance with ZF and radar references for an arbitrary geometry.
struct TinyProblem {
  dfrc::SystemConfig sys;
  dfrc::ReferencePair refs;
};

inline TinyProblem make_problem(Index n_tx, Index n_rx, Index n_rf, Index n_s, std::uint64_t seed) {
  dfrc::SystemConfig sys;
  sys.n_tx = n_tx;
  sys.n_rx = n_rx;
  sys.n_rf = n_rf;
  sys.n_streams = n_s;
  const dfrc::ChannelRealization ch = dfrc::sample_channel(sys, seed);
  const dfrc::RadarScene scene = dfrc::RadarScene::from_targets(dfrc::SceneGeometry{}, n_tx);
  return {sys, {dfrc::zf_precoder(ch.h), dfrc::radar_reference(scene, sys)}};
}

}  // namespace oracle
