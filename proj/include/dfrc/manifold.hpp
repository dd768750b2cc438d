// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "dfrc/types.hpp"

namespace dfrc {

// ---------------------------------------------------------------------------
// Complex circle manifold {P : |P_ij| = 1} and the scaled sphere {F : ||F||_F = r},
// both embedded in C^{m x n} with the real inner product Re tr(A^H B).
//
// The raw template overloads operate on any Eigen expression and perform no
// validation; the point-type overloads below check their preconditions.
// ---------------------------------------------------------------------------

/// V - Re(V o conj(P)) o P
template <typename DP, typename DV>
ComplexMatrix<typename DP::RealScalar> circle_project(const Eigen::MatrixBase<DP>& p,
                                                      const Eigen::MatrixBase<DV>& v) {
  using Real = typename DP::RealScalar;
  ComplexMatrix<Real> out = v;
  out.array() -= (v.array() * p.array().conjugate()).real().template cast<std::complex<Real>>() * p.array();
  return out;
}

/// Entrywise (P + t V) / |P + t V|; throws NumericalError naming the first zero entry.
template <typename DP, typename DV>
ComplexMatrix<typename DP::RealScalar> circle_retract(const Eigen::MatrixBase<DP>& p,
                                                      const Eigen::MatrixBase<DV>& v,
                                                      typename DP::RealScalar step) {
  using Real = typename DP::RealScalar;
  ComplexMatrix<Real> out = p + step * v;
  for (Index j = 0; j < out.cols(); ++j) {
    for (Index i = 0; i < out.rows(); ++i) {
      const Real m = std::abs(out(i, j));
      if (!(m > Real(0)) || !std::isfinite(m))
        throw NumericalError("circle_retract: zero entry at (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
      out(i, j) /= m;
    }
  }
  return out;
}

/// V - (Re tr(F^H V) / ||F||^2) F
template <typename DF, typename DV>
ComplexMatrix<typename DF::RealScalar> sphere_project(const Eigen::MatrixBase<DF>& f,
                                                      const Eigen::MatrixBase<DV>& v) {
  return v - (real_inner(f, v) / f.squaredNorm()) * f;
}

/// r (F + t V) / ||F + t V||_F
template <typename DF, typename DV>
ComplexMatrix<typename DF::RealScalar> sphere_retract(const Eigen::MatrixBase<DF>& f,
                                                      const Eigen::MatrixBase<DV>& v,
                                                      typename DF::RealScalar step,
                                                      typename DF::RealScalar radius) {
  using Real = typename DF::RealScalar;
  ComplexMatrix<Real> out = f + step * v;
  const Real n = out.norm();
  if (!(n > Real(0)) || !std::isfinite(n)) throw NumericalError("sphere_retract: zero matrix");
  return (radius / n) * out;
}

/// Weingarten-corrected Hessian on the circle: Proj(ehess - Re(egrad o conj(P)) o z).
template <typename DP, typename DG, typename DH, typename DZ>
ComplexMatrix<typename DP::RealScalar> circle_ehess_to_rhess(const Eigen::MatrixBase<DP>& p,
                                                             const Eigen::MatrixBase<DG>& egrad,
                                                             const Eigen::MatrixBase<DH>& ehess_dir,
                                                             const Eigen::MatrixBase<DZ>& z) {
  using Real = typename DP::RealScalar;
  ComplexMatrix<Real> v = ehess_dir;
  v.array() -= (egrad.array() * p.array().conjugate()).real().template cast<std::complex<Real>>() * z.array();
  return circle_project(p, v);
}

/// Proj(ehess) - (Re tr(F^H egrad) / ||F||^2) z
template <typename DF, typename DG, typename DH, typename DZ>
ComplexMatrix<typename DF::RealScalar> sphere_ehess_to_rhess(const Eigen::MatrixBase<DF>& f,
                                                             const Eigen::MatrixBase<DG>& egrad,
                                                             const Eigen::MatrixBase<DH>& ehess_dir,
                                                             const Eigen::MatrixBase<DZ>& z) {
  return sphere_project(f, ehess_dir) - (real_inner(f, egrad) / f.squaredNorm()) * z;
}

// ---------------------------------------------------------------------------
// Validated point types
// ---------------------------------------------------------------------------

class CirclePoint {
 public:
  /// Throws NumericalError if some entry deviates from unit modulus by more than 1e-12.
  explicit CirclePoint(CMatrix p);
  /// Entrywise normalization onto the manifold.
  static CirclePoint normalized(const CMatrix& p);

  const CMatrix& matrix() const { return p_; }
  Index rows() const { return p_.rows(); }
  Index cols() const { return p_.cols(); }

 private:
  struct Unchecked {};
  CirclePoint(CMatrix p, Unchecked) : p_(std::move(p)) {}
  CMatrix p_;
};

class SpherePoint {
 public:
  /// Throws NumericalError unless | ||F||_F - radius | <= 1e-12 max(1, radius).
  SpherePoint(CMatrix f, double radius);
  static SpherePoint normalized(const CMatrix& f, double radius);

  const CMatrix& matrix() const { return f_; }
  double radius() const { return radius_; }

 private:
  struct Unchecked {};
  SpherePoint(CMatrix f, double radius, Unchecked) : f_(std::move(f)), radius_(radius) {}
  CMatrix f_;
  double radius_;
};

/// Tangent vector (zeta_PS, zeta_BB) on the product of circle and sphere.
struct TangentPair {
  CMatrix ps;
  CMatrix bb;

  static TangentPair zeros_like(const TangentPair& t) {
    return {CMatrix::Zero(t.ps.rows(), t.ps.cols()), CMatrix::Zero(t.bb.rows(), t.bb.cols())};
  }

  TangentPair& operator+=(const TangentPair& o) {
    ps += o.ps;
    bb += o.bb;
    return *this;
  }
  TangentPair& operator-=(const TangentPair& o) {
    ps -= o.ps;
    bb -= o.bb;
    return *this;
  }
  TangentPair& operator*=(double s) {
    ps *= s;
    bb *= s;
    return *this;
  }
  friend TangentPair operator+(TangentPair a, const TangentPair& b) { return a += b; }
  friend TangentPair operator-(TangentPair a, const TangentPair& b) { return a -= b; }
  friend TangentPair operator*(double s, TangentPair a) { return a *= s; }
  friend TangentPair operator-(TangentPair a) { return a *= -1.0; }
};

/// Re tr(x_ps^H y_ps) + Re tr(x_bb^H y_bb)
double product_inner(const TangentPair& x, const TangentPair& y);
double product_norm(const TangentPair& x);

bool is_circle_tangent(const CMatrix& p, const CMatrix& z, double tol = 1e-10);
bool is_sphere_tangent(const CMatrix& f, const CMatrix& z, double tol = 1e-10);

CMatrix circle_project(const CirclePoint& p, const CMatrix& v);
CirclePoint circle_retract(const CirclePoint& p, const CMatrix& v, double step);
CMatrix sphere_project(const SpherePoint& s, const CMatrix& v);
SpherePoint sphere_retract(const SpherePoint& s, const CMatrix& v, double step);

/// Checked versions: throw NumericalError if z is not tangent at the point.
CMatrix circle_ehess_to_rhess(const CirclePoint& p, const CMatrix& egrad, const CMatrix& ehess_dir,
                              const CMatrix& z);
CMatrix sphere_ehess_to_rhess(const SpherePoint& s, const CMatrix& egrad, const CMatrix& ehess_dir,
                              const CMatrix& z);

}  // namespace dfrc
