// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Photon-counting stand-in for the optical experiment and the Monte Carlo
// error analysis run on top of the reconstructions.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mstomo/counts.hpp"
#include "mstomo/fiducial.hpp"
#include "mstomo/inversion.hpp"
#include "mstomo/mle.hpp"
#include "mstomo/parallel.hpp"

namespace mstomo {

struct TestState {
  std::string name;
  ComplexVector amplitudes;

  int dim() const noexcept { return static_cast<int>(amplitudes.size()); }
  ComplexMatrix density() const { return amplitudes * amplitudes.adjoint(); }
};

/// The prepared states psi1, psi2, psi3 for D = 6 and D = 15.
TestState test_state(const std::string& name, int dim);

/// Wraps explicit amplitudes; throws unless they have unit norm (1e-9).
TestState custom_state(std::string name, ComplexVector amplitudes);

/// Alpha paired with test state `name` ("psi1" -> alpha_1, ...) for D = 6, 15.
AlphaParam paired_alpha(const std::string& name, int dim);

/// p_sj = tr(rho Pi_sj), tiny negatives clipped to zero.
ProbMatrix forward_probs(const ComplexMatrix& rho, const EffectStack& effects);

/// Independent Poisson draws with the given means, visited in effect order.
CountMatrix sample_poisson(const RealMatrix& means, RngEngine& rng);

/// n_sj ~ Poisson(shots * p_sj), independently per outcome.
CountMatrix sample_round_counts(const ProbMatrix& p, std::int64_t shots, RngEngine& rng);

CountsTable average_counts(std::vector<CountMatrix> rounds);

/// `rounds` rounds of sample_round_counts; round r uses stream (seed, r).
CountsTable simulate_rounds(const ProbMatrix& p, int rounds, std::int64_t shots,
                            std::uint64_t seed);

/// Same with detector response: means eta_sj * shots * p_sj + d_sj.
CountsTable simulate_rounds(const ProbMatrix& p, int rounds, std::int64_t shots,
                            std::uint64_t seed, const DetectorModel& det);

/// <psi|rho|psi>, clipped to [0, 1].
double fidelity(const ComplexMatrix& rho, const ComplexVector& psi);

struct ReconstructOptions {
  bool use_mle = true;
  MleOptions mle;
};

struct Reconstruction {
  ComplexMatrix linear;     // raw linear estimate
  ComplexMatrix estimate;   // MLE result, or the Hermitized linear estimate when MLE is off
  bool converged = true;
  int iterations = 0;
  double min_linear_eigenvalue = 0.0;
};

/// Counts (effect order) -> probabilities -> linear inversion -> optional MLE.
Reconstruction reconstruct(const RealMatrix& counts, const InversionOperator& op,
                           const EffectStack& effects, const DetectorModel& det,
                           const ReconstructOptions& opts = {});

struct MonteCarloOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  ReconstructOptions reconstruct;
};

struct MonteCarloReport {
  std::size_t trials = 0;
  std::vector<double> fidelities;  // indexed by trial, trial 0 is the noiseless one
  std::vector<bool> converged;
  double mean = 0.0;
  double sigma = 0.0;  // sample standard deviation, 0 for a single trial
  double interval_low = 0.0;
  double interval_high = 0.0;
  ComplexMatrix point_estimate;  // reconstruction from the unperturbed averaged counts
};

/// Trial 0 reconstructs the averaged counts as they are; every other trial
/// redraws each cell as Poisson(nbar_sj). Reports mean +- 5 sigma.
MonteCarloReport monte_carlo_fidelity(const CountsTable& counts, const TestState& target,
                                      const InversionOperator& op, const EffectStack& effects,
                                      const DetectorModel& det, const MonteCarloOptions& opts);

}  // namespace mstomo
