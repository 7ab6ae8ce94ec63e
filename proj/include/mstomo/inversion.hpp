// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Explicit linear reconstruction. With P the s_max x D matrix of outcome
// probabilities and F the D x D Fourier matrix, column k of P F equals
// G_k rho_k where rho_k is the k-th cyclic diagonal of rho. Stacking the blocks
// G_k into G and undoing the diagonal bookkeeping gives
//
//   vec(rho) = S_swap * Xblk * pinv(G) * (F (x) I) * vec(P).

#pragma once

#include <optional>

#include "mstomo/counts.hpp"
#include "mstomo/povm.hpp"

namespace mstomo {

/// Outcome probabilities p_sj, shape s_max x D, non-negative, summing to one.
class ProbMatrix {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit ProbMatrix(RealMatrix entries);

  int dim() const noexcept { return static_cast<int>(entries_.cols()); }
  int s_max() const noexcept { return static_cast<int>(entries_.rows()); }
  const RealMatrix& entries() const noexcept { return entries_; }

 private:
  RealMatrix entries_;
};

/// xi_sk[q] = a_{q-s+k} conj(a_{q-s}) v_{q+k} conj(v_q), indices mod D, with v
/// the diagonal of V^floor(s/D).
ComplexVector xi_vector(const ComplexVector& amplitudes, int s, int k);

/// G_k: row s is (sqrt(D)/K_s) <xi_sk|. Shape s_max x D.
ComplexMatrix diagonal_block(const ComplexVector& amplitudes, int k);

/// Block-diagonal G = sum_m |m><m| (x) G_m, shape (D s_max) x D^2. Accepts
/// unnormalized amplitudes so condition-number scans can use it directly.
ComplexMatrix big_g(const ComplexVector& amplitudes);
ComplexMatrix big_g(const Fiducial& f);

/// Singular values of G gathered block by block (G is block diagonal in m),
/// unsorted.
RealVector g_singular_values(const ComplexVector& amplitudes);

/// cond(G) from g_singular_values, with the rank cutoff of the full matrix.
double g_condition_number(const ComplexVector& amplitudes);

/// Xblk = sum_m X^m (x) |m><m|.
ComplexMatrix diagonal_shift_map(int dim);

/// Precomputed reconstruction map for one fiducial. Immutable once built.
class InversionOperator {
 public:
  /// pinv_rel_tol overrides the default SVD cutoff used for pinv(G).
  explicit InversionOperator(Fiducial fiducial, std::optional<double> pinv_rel_tol = {});

  int dim() const noexcept { return fiducial_.dim(); }
  int s_max() const noexcept { return s_max_; }
  const Fiducial& fiducial() const noexcept { return fiducial_; }
  const ComplexMatrix& g() const noexcept { return g_; }
  const ComplexMatrix& g_pinv() const noexcept { return g_pinv_; }
  /// S_swap Xblk pinv(G) (F (x) I_smax), shape D^2 x (D s_max).
  const ComplexMatrix& recon_map() const noexcept { return recon_map_; }
  /// cond(G); +infinity when G is numerically rank deficient.
  double condition_number() const noexcept { return cond_; }

 private:
  Fiducial fiducial_;
  int s_max_;
  ComplexMatrix g_;
  ComplexMatrix g_pinv_;
  ComplexMatrix recon_map_;
  double cond_;
};

/// p_sj = n_sj / sum n. Throws when every count is zero.
ProbMatrix counts_to_prob_matrix(const RealMatrix& counts);
ProbMatrix counts_to_prob_matrix(const CountsTable& counts);

/// Raw linear estimate. Not Hermitized and not guaranteed PSD.
ComplexMatrix linear_invert(const ProbMatrix& p, const InversionOperator& op);

}  // namespace mstomo
