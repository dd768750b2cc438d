// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfrc {

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cdouble = std::complex<double>;
using CMatrix = ComplexMatrix<double>;
using CVector = ComplexVector<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  NotPositiveDefinite(const std::string& what, Index pivot)
      : NumericalError(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
  Index pivot() const noexcept { return pivot_; }

 private:
  Index pivot_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Real inner product <A, B> = Re tr(A^H B) on complex matrices.
template <typename DerivedA, typename DerivedB>
double real_inner(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a.array().conjugate() * b.array()).real().sum();
}

template <typename DerivedA, typename DerivedB>
void require_same_shape(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

}  // namespace dfrc
