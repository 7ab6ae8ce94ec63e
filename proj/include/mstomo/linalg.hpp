// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Dense complex helpers shared by every stage of the reconstruction. All
// functions are templated on the Eigen expression they receive, so they accept
// blocks, maps and products without forcing a temporary at the call site.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include "mstomo/errors.hpp"

namespace mstomo {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

template <typename Derived>
using PlainMatrixOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Derived>
using PlainVectorOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

/// Column stacking: vec(A) = sum_j |j> (x) A|j>.
template <typename Derived>
PlainVectorOf<Derived> vec(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) throw InvalidArgument("vec: empty matrix");
  PlainVectorOf<Derived> out(a.size());
  const Eigen::Index rows = a.rows();
  for (Eigen::Index c = 0; c < a.cols(); ++c) out.segment(c * rows, rows) = a.col(c);
  return out;
}

/// Inverse of vec.
template <typename Derived>
PlainMatrixOf<Derived> unvec(const Eigen::MatrixBase<Derived>& v, Eigen::Index rows,
                             Eigen::Index cols) {
  if (v.cols() != 1 || v.size() != rows * cols)
    throw DimensionMismatch("unvec: vector of length " + std::to_string(v.size()) +
                            " cannot form a " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " matrix");
  PlainMatrixOf<Derived> out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) out.col(c) = v.segment(c * rows, rows);
  return out;
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Entrywise product of equally shaped operands.
template <typename DerivedA, typename DerivedB>
auto hadamard(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("hadamard: operand shapes differ");
  return a.cwiseProduct(b).eval();
}

/// Unitary, symmetric DFT matrix F[l][m] = exp(2 pi i l m / D) / sqrt(D).
template <typename Real = double>
CMatrix<Real> fourier(int dim) {
  if (dim < 1) throw InvalidArgument("fourier: dimension must be positive");
  CMatrix<Real> f(dim, dim);
  const Real norm = Real(1) / std::sqrt(Real(dim));
  for (int l = 0; l < dim; ++l)
    for (int m = 0; m < dim; ++m) {
      // reduce l*m first so large dimensions keep full phase accuracy
      const int k = (l * m) % dim;
      f(l, m) = std::polar(norm, Real(2) * std::numbers::pi_v<Real> * Real(k) / Real(dim));
    }
  return f;
}

/// D^2 x D^2 permutation with S(e_j (x) e_k) = e_k (x) e_j.
template <typename Real = double>
CMatrix<Real> swap_matrix(int dim) {
  if (dim < 1) throw InvalidArgument("swap_matrix: dimension must be positive");
  CMatrix<Real> s = CMatrix<Real>::Zero(dim * dim, dim * dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) s(k * dim + j, j * dim + k) = Real(1);
  return s;
}

/// Cyclic shift X with X|k> = |k+1 mod D>, raised to an arbitrary integer power.
template <typename Real = double>
CMatrix<Real> shift_power(int dim, int power) {
  if (dim < 1) throw InvalidArgument("shift_power: dimension must be positive");
  const int p = ((power % dim) + dim) % dim;
  CMatrix<Real> x = CMatrix<Real>::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) x((k + p) % dim, k) = Real(1);
  return x;
}

namespace detail {

template <typename Derived>
auto svd_of(const Eigen::MatrixBase<Derived>& a, unsigned options) {
  using Plain = PlainMatrixOf<Derived>;
  // one-sided Jacobi: BDCSVD in Eigen 3.4.0 mis-deflates some block-structured inputs
  Eigen::JacobiSVD<Plain> svd(a.eval(), options);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  return svd;
}

template <typename Real>
Real default_rank_tolerance(Eigen::Index rows, Eigen::Index cols) {
  return Real(std::max(rows, cols)) * std::numeric_limits<Real>::epsilon();
}

}  // namespace detail

/// Moore-Penrose pseudoinverse. Singular values below rel_tol * sigma_max are
/// dropped; the default rel_tol is max(rows, cols) * epsilon.
template <typename Derived>
PlainMatrixOf<Derived> pinv(const Eigen::MatrixBase<Derived>& a,
                            std::optional<typename Derived::RealScalar> rel_tol = {}) {
  using Real = typename Derived::RealScalar;
  if (!a.allFinite()) throw InvalidArgument("pinv: non-finite entries");
  const auto svd = detail::svd_of(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Real cutoff =
      rel_tol.value_or(detail::default_rank_tolerance<Real>(a.rows(), a.cols())) *
      (sv.size() > 0 ? sv(0) : Real(0));
  Eigen::Matrix<Real, Eigen::Dynamic, 1> inv_sv(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv_sv(i) = sv(i) > cutoff ? Real(1) / sv(i) : Real(0);
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

/// Singular values in decreasing order.
template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> singular_values(
    const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) throw InvalidArgument("singular_values: empty matrix");
  if (!a.allFinite()) throw InvalidArgument("singular_values: non-finite entries");
  return detail::svd_of(a, 0).singularValues();
}

/// sigma_max / sigma_min of a singular spectrum taken from a rows x cols
/// matrix. +infinity when sigma_min falls below the default pinv cutoff.
template <typename Real>
Real cond_from_singular_values(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& sv, Eigen::Index rows,
                               Eigen::Index cols) {
  if (sv.size() == 0) throw InvalidArgument("cond: empty spectrum");
  const Real smax = sv.maxCoeff();
  if (smax == Real(0)) throw InvalidArgument("cond: zero matrix");
  const Real smin = sv.minCoeff();
  if (smin <= detail::default_rank_tolerance<Real>(rows, cols) * smax)
    return std::numeric_limits<Real>::infinity();
  return smax / smin;
}

/// sigma_max / sigma_min over all min(rows, cols) singular values. Returns
/// +infinity when sigma_min falls below the default pinv cutoff.
template <typename Derived>
typename Derived::RealScalar cond(const Eigen::MatrixBase<Derived>& a) {
  return cond_from_singular_values(singular_values(a), a.rows(), a.cols());
}

template <typename Derived>
PlainMatrixOf<Derived> hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("hermitian_part: matrix is not square");
  return (a + a.adjoint()) / typename Derived::RealScalar(2);
}

/// Nearest positive semidefinite matrix in Frobenius norm to the Hermitian
/// part of a: negative eigenvalues are clipped to zero.
template <typename Derived>
PlainMatrixOf<Derived> psd_project(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  const PlainMatrixOf<Derived> h = hermitian_part(a);
  Eigen::SelfAdjointEigenSolver<PlainMatrixOf<Derived>> eig(h);
  if (eig.info() != Eigen::Success) throw NumericalError("psd_project: eigensolver failed");
  const auto clipped = eig.eigenvalues().cwiseMax(Real(0));
  PlainMatrixOf<Derived> out =
      eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
  return hermitian_part(out);
}

template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<PlainMatrixOf<Derived>> eig(hermitian_part(a),
                                                           Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver failed");
  return eig.eigenvalues()(0);
}

}  // namespace mstomo
