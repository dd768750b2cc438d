// SPDX-License-Identifier: Apache-2.0
#include "dfrc/numerics.hpp"

#include <cmath>
#include <string>

namespace dfrc {

namespace {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
}

void fix_phase(CVector& v) {
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) > 0.0) v *= std::conj(v(k)) / std::abs(v(k));
}

}  // namespace

CMatrix hermitian_part(const CMatrix& a, const char* what) {
  require_square(a, what);
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > 1e-10 * scale)
    throw NumericalError(std::string(what) + ": matrix is not Hermitian");
  return 0.5 * (a + a.adjoint());
}

HermitianEig hermitian_eig(const CMatrix& a) {
  const CMatrix h = hermitian_part(a, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eig: no convergence");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix cholesky_lower(const CMatrix& b) {
  const CMatrix h = hermitian_part(b, "cholesky");
  const Eigen::LLT<CMatrix> llt(h);
  if (llt.info() == Eigen::Success) {
    CMatrix l = llt.matrixL();
    if (l.allFinite()) return l;
  }
  // LLT does not report where it broke down. Positive definiteness of leading
  // blocks is monotone in their size, so bisect for the first failing one.
  auto leading_pd = [&](Index k) {
    const Eigen::LLT<CMatrix> part(h.topLeftCorner(k, k));
    return part.info() == Eigen::Success && CMatrix(part.matrixL()).allFinite();
  };
  Index lo = 0, hi = h.rows();  // leading_pd(lo) holds, leading_pd(hi) fails
  while (hi - lo > 1) {
    const Index mid = (lo + hi) / 2;
    (mid == 0 || leading_pd(mid) ? lo : hi) = mid;
  }
  throw NotPositiveDefinite("matrix is not positive definite", hi - 1);
}

PrincipalPair generalized_eig_principal(const CMatrix& a, const CMatrix& b) {
  require_square(a, "generalized_eig_principal");
  require_same_shape(a, b, "generalized_eig_principal");
  const CMatrix l = cholesky_lower(b);
  const auto lower = l.triangularView<Eigen::Lower>();
  // C = L^{-1} A L^{-H}
  CMatrix tmp = lower.solve(hermitian_part(a, "generalized_eig_principal"));
  CMatrix c = lower.solve(tmp.adjoint()).adjoint();
  const HermitianEig eig = hermitian_eig(0.5 * (c + c.adjoint()));
  const Index top = eig.values.size() - 1;
  CVector w = eig.vectors.col(top);
  CVector v = l.adjoint().triangularView<Eigen::Upper>().solve(w);
  v.normalize();
  fix_phase(v);
  return {eig.values(top), v};
}

CMatrix solve_hpd(const CMatrix& b, const CMatrix& x) {
  require_square(b, "solve_hpd");
  if (b.rows() != x.rows()) throw DimensionError("solve_hpd: rhs has wrong row count");
  const CMatrix l = cholesky_lower(b);
  CMatrix y = l.triangularView<Eigen::Lower>().solve(x);
  return l.adjoint().triangularView<Eigen::Upper>().solve(y);
}

double logdet_plus(const CMatrix& a) {
  const RVector lambda = hermitian_eig(a).values;
  double sum = 0.0;
  for (double v : lambda) {
    if (v < -1e-9) throw NumericalError("logdet_plus: matrix is not positive semidefinite");
    sum += std::log2(1.0 + v);
  }
  return sum;
}

}  // namespace dfrc
