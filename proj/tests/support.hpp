// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Random instances and brute-force reference implementations shared by the
// unit tests and the acceptance suite. Oracles here are written from the
// defining formulas with explicit loops and do not call the library routine
// they are compared against.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mstomo/inversion.hpp"
#include "mstomo/linalg.hpp"
#include "mstomo/povm.hpp"

namespace mstomo::testing {

using Complex = std::complex<double>;

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(n(rng), n(rng));
  return m;
}

inline ComplexVector random_unit_vector(int dim, std::mt19937_64& rng) {
  ComplexVector v = random_matrix(dim, 1, rng);
  return v / v.norm();
}

/// Ginibre mixed state G G^dagger / tr.
inline ComplexMatrix random_density(int dim, std::mt19937_64& rng) {
  const ComplexMatrix g = random_matrix(dim, dim, rng);
  const ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline Fiducial random_fiducial(int dim, std::mt19937_64& rng) {
  return Fiducial(random_unit_vector(dim, rng));
}

/// Random fiducial with cond(G) below `limit`, by rejection.
inline Fiducial random_conditioned_fiducial(int dim, double limit, std::mt19937_64& rng,
                                            int max_attempts = 100000) {
  for (int i = 0; i < max_attempts; ++i) {
    Fiducial f = random_fiducial(dim, rng);
    if (cond(big_g(f)) < limit) return f;
  }
  throw NumericalError("no fiducial below the requested condition number");
}

inline Complex omega_pow(int dim, long long e) {
  const long long r = ((e % dim) + dim) % dim;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / dim);
}

/// Generators as explicit matrices: X|k> = |k+1>, Z|k> = w^k |k>,
/// V = diag(1,...,1,-i,...,-i) with the -i block starting at floor(D/2).
inline ComplexMatrix shift_op(int dim) {
  ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) x((k + 1) % dim, k) = 1.0;
  return x;
}
inline ComplexMatrix clock_op(int dim) {
  ComplexMatrix z = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) z(k, k) = omega_pow(dim, k);
  return z;
}
inline ComplexMatrix phase_op(int dim) {
  ComplexMatrix v = ComplexMatrix::Identity(dim, dim);
  for (int k = dim / 2; k < dim; ++k) v(k, k) = Complex(0.0, -1.0);
  return v;
}

inline ComplexMatrix mat_pow(const ComplexMatrix& a, int p) {
  ComplexMatrix out = ComplexMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < p; ++i) out = out * a;
  return out;
}

/// V^floor(s/D) X^s Z^j |a> by matrix products.
inline ComplexVector ms_state_oracle(const ComplexVector& a, int s, int j) {
  const int dim = static_cast<int>(a.size());
  return mat_pow(phase_op(dim), s / dim) * mat_pow(shift_op(dim), s) * mat_pow(clock_op(dim), j) * a;
}

inline int k_weight_oracle(int dim, int s) {
  if (dim % 2 == 1) return dim;
  return (s < dim / 2 || s >= dim) ? 2 * dim : dim;
}

/// p_sj = <alpha_sj|rho|alpha_sj> / K_s, directly.
inline RealMatrix probs_oracle(const ComplexVector& a, const ComplexMatrix& rho) {
  const int dim = static_cast<int>(a.size());
  const int smax = dim % 2 == 1 ? dim : 3 * dim / 2;
  RealMatrix p(smax, dim);
  for (int s = 0; s < smax; ++s)
    for (int j = 0; j < dim; ++j) {
      const ComplexVector st = ms_state_oracle(a, s, j);
      p(s, j) = st.dot(rho * st).real() / k_weight_oracle(dim, s);
    }
  return p;
}

/// (P F)_{sm} = (sqrt(D)/K_s) <xi_sm | d_m>, where d_m[q] = rho_{q+m, q}.
/// Returns d_m read straight off the density matrix.
inline ComplexVector lower_diagonal(const ComplexMatrix& rho, int m) {
  const auto dim = rho.rows();
  ComplexVector d(dim);
  for (Eigen::Index q = 0; q < dim; ++q) d(q) = rho((q + m) % dim, q);
  return d;
}

inline ComplexMatrix dft_oracle(int dim) {
  ComplexMatrix f(dim, dim);
  for (int l = 0; l < dim; ++l)
    for (int m = 0; m < dim; ++m) f(l, m) = omega_pow(dim, static_cast<long long>(l) * m) / std::sqrt(double(dim));
  return f;
}

/// Per-diagonal reconstruction: d_m = pinv(G_m) (P F)[:, m], then
/// rho_{q+m, q} = d_m[q]. Each block is inverted on its own through the
/// normal equations (G_m^dagger G_m)^{-1} G_m^dagger.
inline ComplexMatrix blockwise_reconstruction(const ComplexVector& a, const RealMatrix& p) {
  const int dim = static_cast<int>(a.size());
  const ComplexMatrix pf = p.cast<Complex>() * dft_oracle(dim);
  ComplexMatrix rho(dim, dim);
  for (int m = 0; m < dim; ++m) {
    const ComplexMatrix gm = diagonal_block(a, m);
    const ComplexMatrix normal = gm.adjoint() * gm;
    const ComplexVector d = normal.ldlt().solve(gm.adjoint() * pf.col(m));
    for (int q = 0; q < dim; ++q) rho((q + m) % dim, q) = d(q);
  }
  return rho;
}

/// xi_sm from the componentwise expansion over the diagonals of rho. With
/// b = V^floor(s/D) X^s a, alpha_sj[x] = b[x] w^{j(x-s)}, so
///   K_s p_sj = sum_m w^{-jm} sum_q conj(b[q+m]) b[q] rho[q+m, q]
/// and xi_sm[q] = b[q+m] conj(b[q]).
inline ComplexVector xi_oracle(const ComplexVector& a, int s, int m) {
  const int dim = static_cast<int>(a.size());
  const ComplexVector b = ms_state_oracle(a, s, 0);
  ComplexVector xi(dim);
  for (int q = 0; q < dim; ++q) xi(q) = b((q + m) % dim) * std::conj(b(q));
  return xi;
}

/// Central finite-difference directional derivative.
template <typename F>
double central_difference(F&& f, const ComplexMatrix& x, const ComplexMatrix& dir, double h) {
  return (f(x + h * dir) - f(x - h * dir)) / (2.0 * h);
}

inline ComplexMatrix random_hermitian(int dim, std::mt19937_64& rng) {
  return hermitian_part(random_matrix(dim, dim, rng));
}

}  // namespace mstomo::testing
