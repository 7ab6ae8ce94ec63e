// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Multiply symmetric states generated from a fiducial by powers of the shift
// (X), clock (Z) and phase (V) operators, and the informationally complete
// POVM built from their sub-normalized projectors.

#pragma once

#include <span>
#include <vector>

#include "mstomo/linalg.hpp"

namespace mstomo {

/// Normalized fiducial state |alpha_0> = sum_k a_k |k>.
class Fiducial {
 public:
  static constexpr double kNormTolerance = 1e-9;

  /// Throws InvalidFiducial when | ||a||^2 - 1 | exceeds kNormTolerance.
  explicit Fiducial(ComplexVector amplitudes);

  /// Rescales to unit norm. Only for callers that construct amplitudes
  /// whose overall scale is irrelevant (principal-branch fiducials).
  static Fiducial normalized(const ComplexVector& amplitudes);

  int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }

 private:
  ComplexVector amplitudes_;
};

struct GeneratorSet {
  int dim = 0;
  int kappa = 0;  // floor(D/2)
  ComplexMatrix shift;
  ComplexMatrix clock;
  ComplexMatrix phase;
};

GeneratorSet generators(int dim);

/// Number of shift labels: D for odd D, 3D/2 for even D.
int s_max(int dim);

/// Inverse weight K_s of the effects with shift label s.
int k_weight(int dim, int s);

/// Diagonal of V^floor(s/D).
ComplexVector phase_diagonal(int dim, int s);

/// |alpha_sj> = V^floor(s/D) X^s Z^j |alpha_0>.
ComplexVector ms_state(const Fiducial& f, int s, int j);

struct Effect {
  int s = 0;
  int j = 0;
  int k_weight = 1;
  ComplexVector state;   // |alpha_sj>
  ComplexMatrix matrix;  // |alpha_sj><alpha_sj| / K_s
};

/// All s_max * D effects ordered with s outer and j inner.
std::vector<Effect> build_povm(const Fiducial& f);

/// Max-abs entry of (sum of effects - identity).
double completeness_residual(std::span<const Effect> effects);

/// Stacked conjugate vectorizations of a fixed effect list, so that
/// tr(Pi_j A) for every j is a single matrix-vector product.
class EffectStack {
 public:
  explicit EffectStack(std::span<const Effect> effects);

  int dim() const noexcept { return dim_; }
  Eigen::Index size() const noexcept { return rows_.rows(); }

  /// Row j holds vec(Pi_j)^dagger.
  const ComplexMatrix& rows() const noexcept { return rows_; }

  /// Real parts of tr(Pi_j A) for every j.
  RealVector traces(const ComplexMatrix& a) const;

  /// sum_j w_j Pi_j.
  ComplexMatrix weighted_sum(const RealVector& weights) const;

 private:
  int dim_;
  ComplexMatrix rows_;
};

}  // namespace mstomo
