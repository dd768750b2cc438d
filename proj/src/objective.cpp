// SPDX-License-Identifier: Apache-2.0
#include "dfrc/objective.hpp"

#include <string>

namespace dfrc {

void ReferencePair::validate() const {
  require_same_shape(f_com, f_rad, "ReferencePair");
  if (!f_com.allFinite() || !f_rad.allFinite()) throw NumericalError("ReferencePair: non-finite entries");
}

void TradeoffConfig::validate() const {
  if (!(phi >= 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in [0, 1], got " + std::to_string(phi));
}

ConnectionMask ConnectionMask::fully_connected(Index n_tx, Index n_rf) {
  if (n_tx < 1 || n_rf < 1) throw DimensionError("ConnectionMask: dimensions must be positive");
  return ConnectionMask(RMatrix::Ones(n_tx, n_rf), true);
}

ConnectionMask ConnectionMask::partially_connected(Index n_tx, Index n_rf) {
  if (n_tx < 1 || n_rf < 1 || n_tx % n_rf != 0)
    throw DimensionError("ConnectionMask: n_rf must divide n_tx");
  const Index z = n_tx / n_rf;
  RMatrix d = RMatrix::Zero(n_tx, n_rf);
  for (Index j = 0; j < n_rf; ++j) d.block(j * z, j, z, 1).setOnes();
  return ConnectionMask(std::move(d), n_rf == 1);
}

ConnectionMask ConnectionMask::for_structure(Structure s, Index n_tx, Index n_rf) {
  return s == Structure::fully_connected ? fully_connected(n_tx, n_rf) : partially_connected(n_tx, n_rf);
}

CMatrix ConnectionMask::apply(const CMatrix& x) const {
  if (full_) return x;
  require_same_shape(x, d_, "ConnectionMask::apply");
  return (x.array() * d_.array().cast<cdouble>()).matrix();
}

double weighted_objective(const CMatrix& f_eff, const ReferencePair& refs, double phi) {
  require_same_shape(f_eff, refs.f_com, "weighted_objective");
  require_same_shape(f_eff, refs.f_rad, "weighted_objective");
  return phi * (f_eff - refs.f_com).squaredNorm() + (1.0 - phi) * (f_eff - refs.f_rad).squaredNorm();
}

CMatrix effective_precoder(const PartialPoint& pt, const ConnectionMask& mask) {
  require_same_shape(pt.f_ps.matrix(), mask.matrix(), "effective_precoder");
  if (pt.f_bb.matrix().rows() != mask.n_rf()) throw DimensionError("effective_precoder: F_BB rows != n_rf");
  return mask.apply(pt.f_ps.matrix()) * pt.f_bb.matrix();
}

double weighted_objective(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                          double phi) {
  return weighted_objective(effective_precoder(pt, mask), refs, phi);
}

LocalModel::LocalModel(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                       double phi)
    : mask_(mask), ps_(pt.f_ps.matrix()), bb_(pt.f_bb.matrix()) {
  const CMatrix eff = effective_precoder(pt, mask);
  require_same_shape(eff, refs.f_com, "LocalModel");
  require_same_shape(eff, refs.f_rad, "LocalModel");
  masked_ps_ = mask.apply(ps_);
  value_ = weighted_objective(eff, refs, phi);
  // phi (E - F_com) + (1 - phi)(E - F_rad) collapses to E - blend(phi).
  residual_ = eff - refs.blend(phi);
  egrad_.ps = mask.apply(2.0 * residual_ * bb_.adjoint());
  egrad_.bb = 2.0 * masked_ps_.adjoint() * residual_;
  rgrad_.ps = circle_project(ps_, egrad_.ps);
  rgrad_.bb = sphere_project(bb_, egrad_.bb);
}

EuclideanPair LocalModel::ehess(const TangentPair& z) const {
  const CMatrix masked_zps = mask_.apply(z.ps);
  const CMatrix d_eff = masked_zps * bb_ + masked_ps_ * z.bb;
  EuclideanPair h;
  h.ps = mask_.apply(2.0 * residual_ * z.bb.adjoint() + 2.0 * d_eff * bb_.adjoint());
  h.bb = 2.0 * masked_zps.adjoint() * residual_ + 2.0 * masked_ps_.adjoint() * d_eff;
  return h;
}

TangentPair LocalModel::hess(const TangentPair& z) const {
  // Re-project the input: the sphere term carries any normal component through
  // with weight <F, egrad>/||F||^2, which iterative solvers would amplify.
  const TangentPair zt{circle_project(ps_, z.ps), sphere_project(bb_, z.bb)};
  const EuclideanPair h = ehess(zt);
  return {circle_ehess_to_rhess(ps_, egrad_.ps, h.ps, zt.ps), sphere_ehess_to_rhess(bb_, egrad_.bb, h.bb, zt.bb)};
}

double LocalModel::model(const TangentPair& z) const {
  return value_ + product_inner(rgrad_, z) + 0.5 * product_inner(hess(z), z);
}

EuclideanPair egrad_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                            double phi) {
  return LocalModel(pt, mask, refs, phi).egrad();
}

EuclideanPair ehess_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                            double phi, const TangentPair& z) {
  require_same_shape(pt.f_ps.matrix(), z.ps, "ehess_partial");
  require_same_shape(pt.f_bb.matrix(), z.bb, "ehess_partial");
  return LocalModel(pt, mask, refs, phi).ehess(z);
}

TangentPair rgrad_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                          double phi) {
  return LocalModel(pt, mask, refs, phi).rgrad();
}

TangentPair rhess_partial(const PartialPoint& pt, const ConnectionMask& mask, const ReferencePair& refs,
                          double phi, const TangentPair& z) {
  require_same_shape(pt.f_ps.matrix(), z.ps, "rhess_partial");
  require_same_shape(pt.f_bb.matrix(), z.bb, "rhess_partial");
  if (!is_circle_tangent(pt.f_ps.matrix(), z.ps) || !is_sphere_tangent(pt.f_bb.matrix(), z.bb))
    throw NumericalError("rhess_partial: direction is not tangent");
  return LocalModel(pt, mask, refs, phi).hess(z);
}

SubproblemEval madmm_sub_value_grad(const CMatrix& f_rf, const CMatrix& f_target, const CMatrix& f_bb) {
  if (f_rf.cols() != f_bb.rows() || f_rf.rows() != f_target.rows() || f_bb.cols() != f_target.cols())
    throw DimensionError("madmm_sub_value_grad: shapes are not conformable");
  const CMatrix diff = f_target - f_rf * f_bb;
  return {diff.squaredNorm(), -2.0 * diff * f_bb.adjoint()};
}

}  // namespace dfrc
