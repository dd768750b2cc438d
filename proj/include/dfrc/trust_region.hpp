// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

#include "dfrc/beamformer.hpp"
#include "dfrc/objective.hpp"

namespace dfrc {

struct TcgConfig {
  int max_inner = 0;     // 0: dimension of the search space
  double kappa = 0.1;
  double theta = 1.0;
};

struct TrConfig {
  double delta_bar = 0.0;  // 0: sqrt(manifold dimension)
  double delta0 = 0.0;     // 0: delta_bar / 8
  double rho_prime = 0.1;
  int k_max = 200;
  double grad_tol = 1e-6;
  double min_step = 1e-6;  // stop once an accepted step is shorter than this
  TcgConfig tcg;

  void validate() const;
  /// Fills in the dimension-dependent defaults and validates the result.
  TrConfig resolved(Index manifold_dim) const;
};

struct TrState {
  PartialPoint point;
  double delta = 1.0;
  double rho = 0.0;
  int iter = 0;
};

/// Real dimension of circle(n_tx x n_rf) x sphere(n_rf x n_s).
Index product_manifold_dim(Index n_tx, Index n_rf, Index n_streams);

enum class TcgStop { zero_gradient, negative_curvature, boundary, residual, max_inner };

template <typename Vec>
struct TcgResult {
  Vec z;
  Vec hz;  // H z, kept for the model decrease
  TcgStop stop = TcgStop::zero_gradient;
  int iterations = 0;
};

/// Steihaug-Toint truncated CG for min <g,z> + 1/2 <H z, z> subject to <z,z> <= delta^2.
/// `hess(v)` applies H, `inner(a, b)` is the inner product; Vec needs +, - and
/// scalar multiplication.
template <typename Vec, typename HessOp, typename Inner>
TcgResult<Vec> truncated_cg(const Vec& grad, HessOp&& hess, Inner&& inner, double delta, const TcgConfig& cfg,
                            int max_inner) {
  TcgResult<Vec> out{0.0 * grad, 0.0 * grad, TcgStop::zero_gradient, 0};
  const double r0 = std::sqrt(inner(grad, grad));
  if (!(r0 > 0.0)) return out;
  const double stop_at = r0 * std::min(cfg.kappa, std::pow(r0, cfg.theta));

  Vec r = grad;
  Vec d = -1.0 * grad;
  double rr = r0 * r0;
  double zz = 0.0;

  auto to_boundary = [&](const Vec& hd) {
    const double zd = inner(out.z, d);
    const double dd = inner(d, d);
    const double tau = (-zd + std::sqrt(zd * zd + dd * (delta * delta - zz))) / dd;
    out.z = out.z + tau * d;
    out.hz = out.hz + tau * hd;
  };

  out.stop = TcgStop::max_inner;
  for (int j = 0; j < max_inner; ++j) {
    out.iterations = j + 1;
    const Vec hd = hess(d);
    const double curv = inner(d, hd);
    if (!(curv > 0.0)) {
      to_boundary(hd);
      out.stop = TcgStop::negative_curvature;
      return out;
    }
    const double alpha = rr / curv;
    const Vec z_new = out.z + alpha * d;
    const double zz_new = inner(z_new, z_new);
    if (zz_new >= delta * delta) {
      to_boundary(hd);
      out.stop = TcgStop::boundary;
      return out;
    }
    out.z = z_new;
    out.hz = out.hz + alpha * hd;
    zz = zz_new;
    r = r + alpha * hd;
    const double rr_new = inner(r, r);
    if (std::sqrt(rr_new) <= stop_at) {
      out.stop = TcgStop::residual;
      return out;
    }
    d = (rr_new / rr) * d - r;
    rr = rr_new;
  }
  return out;
}

/// J(pt) + <grad, z> + 1/2 <Hess z, z>
double model_value(const PartialPoint& pt, const TangentPair& z, const ReferencePair& refs, double phi,
                   const ConnectionMask& mask);

TcgResult<TangentPair> tcg_solve(const LocalModel& model, double delta, const TcgConfig& cfg);
TangentPair tcg_subproblem(const PartialPoint& pt, const ReferencePair& refs, double phi,
                           const ConnectionMask& mask, double delta, const TcgConfig& cfg);

/// (J_old - J_new) / model_decrease with the degenerate-denominator guard.
double rho_value(double j_old, double j_new, double model_decrease);
double rho_ratio(const PartialPoint& pt, const PartialPoint& candidate, const TangentPair& z,
                 const ReferencePair& refs, double phi, const ConnectionMask& mask);

PartialPoint accept_step(const TrState& state, const PartialPoint& candidate, double rho, double rho_prime);
double radius_update(double delta, double rho, double step_norm, double delta_bar);

/// Retraction of the pair: circle retraction on F_PS, sphere retraction on F_BB.
PartialPoint retract(const PartialPoint& pt, const TangentPair& z);

/// F_PS with uniform random phases, F_BB complex Gaussian scaled onto the sphere.
PartialPoint rpmtr_init(Index n_tx, Index n_rf, Index n_streams, std::uint64_t seed);

SolveResult rpmtr_solve(const ReferencePair& refs, double phi, const ConnectionMask& mask, const TrConfig& cfg,
                        const PartialPoint& init);

}  // namespace dfrc
