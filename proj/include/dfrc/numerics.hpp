// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfrc/types.hpp"

namespace dfrc {

struct HermitianEig {
  RVector values;   // ascending
  CMatrix vectors;  // unit-norm columns matching `values`
};

struct PrincipalPair {
  double value = 0.0;
  CVector vector;  // unit norm, phase fixed so its largest-modulus entry is real positive
};

/// (A + A^H) / 2 after checking that A is Hermitian to within 1e-10 ||A||_F.
CMatrix hermitian_part(const CMatrix& a, const char* what = "hermitian_part");

HermitianEig hermitian_eig(const CMatrix& a);

/// Lower Cholesky factor of a Hermitian positive definite matrix. Throws
/// NotPositiveDefinite carrying the first failing pivot.
CMatrix cholesky_lower(const CMatrix& b);

/// Principal eigenpair of B^{-1} A via Cholesky whitening, B = L L^H.
PrincipalPair generalized_eig_principal(const CMatrix& a, const CMatrix& b);

/// Solves B Y = X for Hermitian positive definite B.
CMatrix solve_hpd(const CMatrix& b, const CMatrix& x);

/// log2 det(I + A) for Hermitian PSD A, evaluated as sum log2(1 + lambda_k).
double logdet_plus(const CMatrix& a);

}  // namespace dfrc
