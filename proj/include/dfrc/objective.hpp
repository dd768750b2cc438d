// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfrc/manifold.hpp"
#include "dfrc/system.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Fully-digital communication (ZF) and radar reference precoders.
struct ReferencePair {
  CMatrix f_com;
  CMatrix f_rad;

  void validate() const;
  Index n_tx() const { return f_com.rows(); }
  Index n_streams() const { return f_com.cols(); }
  /// phi F_com + (1 - phi) F_rad
  CMatrix blend(double phi) const { return phi * f_com + (1.0 - phi) * f_rad; }
};

struct TradeoffConfig {
  double phi = 0.5;
  void validate() const;
};

/// 0-1 connection-state matrix F_D. The fully-connected structure is the all-ones mask.
class ConnectionMask {
 public:
  static ConnectionMask fully_connected(Index n_tx, Index n_rf);
  /// Block diagonal with blocks of z = n_tx / n_rf ones.
  static ConnectionMask partially_connected(Index n_tx, Index n_rf);
  static ConnectionMask for_structure(Structure s, Index n_tx, Index n_rf);

  const RMatrix& matrix() const { return d_; }
  Index n_tx() const { return d_.rows(); }
  Index n_rf() const { return d_.cols(); }
  bool is_full() const { return full_; }

  /// F_D o X
  CMatrix apply(const CMatrix& x) const;

 private:
  ConnectionMask(RMatrix d, bool full) : d_(std::move(d)), full_(full) {}
  RMatrix d_;
  bool full_;
};

struct PartialPoint {
  CirclePoint f_ps;  // n_tx x n_rf
  SpherePoint f_bb;  // n_rf x n_streams
};

/// Euclidean derivative pair (w.r.t. F_PS, F_BB); not necessarily tangent.
struct EuclideanPair {
  CMatrix ps;
  CMatrix bb;
};

/// phi ||F - F_com||^2 + (1 - phi) ||F - F_rad||^2
double weighted_objective(const CMatrix& f_eff, const ReferencePair& refs, double phi);

/// (F_D o F_PS) F_BB
CMatrix effective_precoder(const PartialPoint& pt, const ConnectionMask& mask);
double weighted_objective(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                          double phi);

EuclideanPair egrad_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                            double phi);
EuclideanPair ehess_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                            double phi, const TangentPair& z);
TangentPair rgrad_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                          double phi);
TangentPair rhess_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                          double phi, const TangentPair& z);

/// Derivative data of the trade-off objective cached at one point, so that
/// repeated Hessian-vector products reuse the residual and gradients.
class LocalModel {
 public:
  LocalModel(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs, double phi);

  double value() const { return value_; }
  const EuclideanPair& egrad() const { return egrad_; }
  const TangentPair& rgrad() const { return rgrad_; }
  /// Euclidean directional derivative of the gradient along z.
  EuclideanPair ehess(const TangentPair& z) const;
  /// Riemannian Hessian; z is projected onto the tangent space first (no check).
  TangentPair hess(const TangentPair& z) const;
  /// J + <grad, z> + 1/2 <Hess z, z>
  double model(const TangentPair& z) const;

 private:
  ConnectionMask mask_;
  CMatrix ps_;
  CMatrix bb_;
  CMatrix masked_ps_;  // F_D o F_PS
  CMatrix residual_;   // (F_D o F_PS) F_BB - (phi F_com + (1-phi) F_rad)
  double value_;
  EuclideanPair egrad_;
  TangentPair rgrad_;
};

struct SubproblemEval {
  double value = 0.0;
  CMatrix egrad;
};

/// g(F_RF) = ||F_target - F_RF F_BB||^2 and its Euclidean gradient -2 (F_target - F_RF F_BB) F_BB^H.
SubproblemEval madmm_sub_value_grad(const CMatrix& f_rf, const CMatrix& f_target, const CMatrix& f_bb);

}  // namespace dfrc
