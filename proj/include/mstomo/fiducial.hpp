// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Fiducial design: the single-parameter equidistant family, the condition
// number of G as a stability figure, grid scans over alpha and random search.

#pragma once

#include <cstdint>

#include "mstomo/povm.hpp"

namespace mstomo {

/// Complex parameter alpha = magnitude * exp(i phase), phase reduced to [0, 2 pi).
struct AlphaParam {
  double magnitude = 0.0;
  double phase = 0.0;

  static AlphaParam polar(double magnitude, double phase);
};

struct LambdaProfile {
  static constexpr double kNegativityTolerance = 1e-9;

  int dim = 0;
  RealVector lambdas;
  bool valid = false;  // every lambda_k >= -kNegativityTolerance
};

/// lambda_k = 1 - |alpha| sin((k pi + (D-1) arg) / D) / sin((k pi - arg) / D),
/// with the analytic limit at the removable singularities arg = k pi.
LambdaProfile lambda_profile(const AlphaParam& alpha, int dim);

/// a_k = sqrt(lambda_k / D). Throws InvalidAlphaRegion if any lambda_k < 0.
Fiducial equidistant_fiducial(const AlphaParam& alpha, int dim);

/// Principal square roots of lambda_k / D, imaginary where lambda_k < 0. Not
/// normalized.
ComplexVector complex_amplitudes(const AlphaParam& alpha, int dim);

/// complex_amplitudes rescaled to unit norm. G is quadratic in the
/// amplitudes, so this has the same condition number as the raw amplitudes.
Fiducial principal_branch_fiducial(const AlphaParam& alpha, int dim);

/// cond(G) for the given amplitudes.
double condition_number(const ComplexVector& amplitudes, int dim);

struct ScanGrid {
  RealVector magnitudes;
  RealVector phases;
  RealMatrix log10_cond;  // rows follow magnitudes, cols follow phases; +inf when singular
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> valid;
};

/// log10 cond(G(alpha)) over the Cartesian grid of |alpha| and arg(alpha).
ScanGrid scan_grid(int dim, const RealVector& magnitudes, const RealVector& phases,
                   unsigned threads = 1);

struct FiducialSearchResult {
  Fiducial fiducial;
  double condition_number;
  std::size_t best_index;
};

/// Samples real non-negative fiducials a_k = sqrt(p_k) with p the normalized
/// squares of standard normals, and keeps the smallest cond(G). Sample i only
/// depends on (seed, i).
FiducialSearchResult random_fiducial_search(int dim, std::size_t n_samples, std::uint64_t seed,
                                            unsigned threads = 1);

}  // namespace mstomo
