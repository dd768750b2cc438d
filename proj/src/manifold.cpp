// SPDX-License-Identifier: Apache-2.0
#include "dfrc/manifold.hpp"

#include <algorithm>

namespace dfrc {

CirclePoint::CirclePoint(CMatrix p) : p_(std::move(p)) {
  for (Index j = 0; j < p_.cols(); ++j)
    for (Index i = 0; i < p_.rows(); ++i)
      if (!(std::abs(std::abs(p_(i, j)) - 1.0) <= 1e-12))
        throw NumericalError("CirclePoint: entry (" + std::to_string(i) + "," + std::to_string(j) +
                             ") is not unit modulus");
}

CirclePoint CirclePoint::normalized(const CMatrix& p) {
  return CirclePoint(circle_retract(p, CMatrix::Zero(p.rows(), p.cols()), 0.0), Unchecked{});
}

SpherePoint::SpherePoint(CMatrix f, double radius) : f_(std::move(f)), radius_(radius) {
  if (!(radius_ > 0.0)) throw NumericalError("SpherePoint: radius must be positive");
  if (!(std::abs(f_.norm() - radius_) <= 1e-12 * std::max(1.0, radius_)))
    throw NumericalError("SpherePoint: Frobenius norm does not match the radius");
}

SpherePoint SpherePoint::normalized(const CMatrix& f, double radius) {
  if (!(radius > 0.0)) throw NumericalError("SpherePoint: radius must be positive");
  return SpherePoint(sphere_retract(f, CMatrix::Zero(f.rows(), f.cols()), 0.0, radius), radius, Unchecked{});
}

double product_inner(const TangentPair& x, const TangentPair& y) {
  require_same_shape(x.ps, y.ps, "product_inner");
  require_same_shape(x.bb, y.bb, "product_inner");
  return real_inner(x.ps, y.ps) + real_inner(x.bb, y.bb);
}

double product_norm(const TangentPair& x) { return std::sqrt(product_inner(x, x)); }

bool is_circle_tangent(const CMatrix& p, const CMatrix& z, double tol) {
  if (p.rows() != z.rows() || p.cols() != z.cols()) return false;
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  return (z.array() * p.array().conjugate()).real().abs().maxCoeff() <= tol * scale;
}

bool is_sphere_tangent(const CMatrix& f, const CMatrix& z, double tol) {
  if (f.rows() != z.rows() || f.cols() != z.cols()) return false;
  return std::abs(real_inner(f, z)) <= tol * std::max(1.0, f.norm() * z.norm());
}

CMatrix circle_project(const CirclePoint& p, const CMatrix& v) {
  require_same_shape(p.matrix(), v, "circle_project");
  return circle_project(p.matrix(), v);
}

CirclePoint circle_retract(const CirclePoint& p, const CMatrix& v, double step) {
  require_same_shape(p.matrix(), v, "circle_retract");
  return CirclePoint::normalized(p.matrix() + step * v);
}

CMatrix sphere_project(const SpherePoint& s, const CMatrix& v) {
  require_same_shape(s.matrix(), v, "sphere_project");
  return sphere_project(s.matrix(), v);
}

SpherePoint sphere_retract(const SpherePoint& s, const CMatrix& v, double step) {
  require_same_shape(s.matrix(), v, "sphere_retract");
  return SpherePoint::normalized(s.matrix() + step * v, s.radius());
}

CMatrix circle_ehess_to_rhess(const CirclePoint& p, const CMatrix& egrad, const CMatrix& ehess_dir,
                              const CMatrix& z) {
  require_same_shape(p.matrix(), egrad, "circle_ehess_to_rhess");
  require_same_shape(p.matrix(), ehess_dir, "circle_ehess_to_rhess");
  if (!is_circle_tangent(p.matrix(), z)) throw NumericalError("circle_ehess_to_rhess: direction is not tangent");
  return circle_ehess_to_rhess(p.matrix(), egrad, ehess_dir, z);
}

CMatrix sphere_ehess_to_rhess(const SpherePoint& s, const CMatrix& egrad, const CMatrix& ehess_dir,
                              const CMatrix& z) {
  require_same_shape(s.matrix(), egrad, "sphere_ehess_to_rhess");
  require_same_shape(s.matrix(), ehess_dir, "sphere_ehess_to_rhess");
  if (!is_sphere_tangent(s.matrix(), z)) throw NumericalError("sphere_ehess_to_rhess: direction is not tangent");
  return sphere_ehess_to_rhess(s.matrix(), egrad, ehess_dir, z);
}

}  // namespace dfrc
