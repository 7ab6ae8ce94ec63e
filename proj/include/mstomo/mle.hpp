// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Poisson maximum-likelihood refinement over the cone of positive operators.
//
// The unknown is an unnormalized operator varrho >= 0 whose trace estimates
// the ensemble size. Expected counts are N_j = eta_j tr(Pi_j varrho) + d_j and
// the objective is
//
//   L(varrho) = sum_j [ N_j - n_j ln N_j + lnGamma(n_j + 1) ],
//
// which is convex, so projected gradient descent reaches the global minimum.

#pragma once

#include <optional>
#include <vector>

#include "mstomo/povm.hpp"

namespace mstomo {

struct DetectorModel {
  RealVector efficiencies;  // eta_j > 0
  RealVector dark_counts;   // d_j >= 0

  /// eta = 1, d = 0 for every outcome.
  static DetectorModel ideal(Eigen::Index outcomes);

  void validate(Eigen::Index outcomes) const;
};

struct MleOptions {
  int max_iters = 5000;
  /// Converged when || varrho - P(varrho - tr(varrho) grad L) ||_F falls below
  /// gradient_tolerance * sum(n).
  double gradient_tolerance = 1e-7;
  /// Iteration continues past convergence until the same measure falls below
  /// refine_tolerance * sum(n), L stops decreasing, or max_iters is reached.
  /// Values above gradient_tolerance act as gradient_tolerance.
  double refine_tolerance = 1e-10;
  double step_shrink = 0.5;
  /// First trial step; defaults to 1 / (estimate of the largest Hessian eigenvalue).
  std::optional<double> initial_step;

  void validate() const;
};

struct MleResult {
  ComplexMatrix rho;      // unit trace
  ComplexMatrix varrho;   // unnormalized optimum
  double unnormalized_trace = 0.0;
  double final_nll = 0.0;
  int iterations = 0;
  bool converged = false;
  /// L - L_sat at the start point and after each accepted step, where L_sat is
  /// L at N = n. Same differences as L without the large constant.
  std::vector<double> nll_history;
  double min_iterate_eigenvalue = 0.0;
};

/// N_j for every effect in stack order.
RealVector expected_counts(const ComplexMatrix& varrho, const EffectStack& effects,
                           const DetectorModel& det);

/// Throws NonpositiveExpectedCount when N_j <= 0 for some n_j > 0.
double neg_log_likelihood(const ComplexMatrix& varrho, const RealVector& counts,
                          const EffectStack& effects, const DetectorModel& det);

/// sum_j eta_j (1 - n_j / N_j) Pi_j.
ComplexMatrix nll_gradient(const ComplexMatrix& varrho, const RealVector& counts,
                           const EffectStack& effects, const DetectorModel& det);

/// Hermitian part, PSD projection, rescaled to trace `total_counts`. Falls back
/// to the scaled identity when the projection vanishes.
ComplexMatrix mle_initial_guess(const ComplexMatrix& linear_estimate, double total_counts);

/// counts are in stack order; init may be any square matrix of the right
/// dimension and is PSD-projected first.
MleResult mle_estimate(const RealVector& counts, const EffectStack& effects,
                       const DetectorModel& det, const ComplexMatrix& init,
                       const MleOptions& opts = {});

}  // namespace mstomo
