// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numbers>

#include "mstomo/simulator.hpp"
#include "support.hpp"

using namespace mstomo;
using namespace mstomo::testing;

TEST_CASE("test states") {
  for (int d : {6, 15})
    for (const char* name : {"psi1", "psi2", "psi3"}) {
      const TestState s = test_state(name, d);
      CHECK(s.dim() == d);
      CHECK(std::abs(s.amplitudes.norm() - 1.0) < 1e-14);
      CHECK(std::abs(s.density().trace().real() - 1.0) < 1e-14);
    }
  CHECK(std::abs(test_state("psi2", 15).amplitudes(7) - 1.0) < 1e-15);
  const TestState p3 = test_state("psi3", 6);
  CHECK(std::arg(p3.amplitudes(4)) == doctest::Approx(-std::numbers::pi / 4));
  CHECK_THROWS_AS(test_state("psi4", 6), InvalidArgument);
  CHECK_THROWS_AS(test_state("psi1", 7), InvalidArgument);
  CHECK_THROWS_AS(custom_state("x", ComplexVector::Ones(3)), InvalidArgument);
  CHECK(paired_alpha("psi2", 6).magnitude == 0.8);
}

TEST_CASE("fidelity") {
  const TestState s = test_state("psi1", 6);
  CHECK(fidelity(s.density(), s.amplitudes) == doctest::Approx(1.0));
  CHECK(fidelity(ComplexMatrix::Identity(6, 6) / 6.0, s.amplitudes) == doctest::Approx(1.0 / 6));
  ComplexMatrix e0 = ComplexMatrix::Zero(6, 6);
  e0(0, 0) = 1.0;
  CHECK(fidelity(e0, s.amplitudes) == doctest::Approx(1.0 / 6));
  CHECK_THROWS_AS(fidelity(e0, ComplexVector::Ones(5)), DimensionMismatch);
}

TEST_CASE("forward probabilities") {
  std::mt19937_64 rng(71);
  const Fiducial f = random_fiducial(4, rng);
  const auto effects = build_povm(f);
  const EffectStack stack(effects);
  const ComplexMatrix rho = random_density(4, rng);
  const ProbMatrix p = forward_probs(rho, stack);
  CHECK((p.entries() - probs_oracle(f.amplitudes(), rho)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(forward_probs(2.0 * rho, stack), InvalidArgument);
}

TEST_CASE("simulated rounds") {
  const TestState s = test_state("psi1", 6);
  const Fiducial f = principal_branch_fiducial(paired_alpha("psi1", 6), 6);
  const auto effects = build_povm(f);
  const EffectStack stack(effects);
  const ProbMatrix p = forward_probs(s.density(), stack);
  const CountsTable t = simulate_rounds(p, 10, 60000, 5);
  CHECK(t.rounds().size() == 10);
  CHECK(std::abs(t.averaged().sum() - 60000.0) < 5.0 * std::sqrt(6e5) / 10.0);
  const CountsTable again = simulate_rounds(p, 10, 60000, 5);
  CHECK(again.averaged() == t.averaged());
  CHECK(simulate_rounds(p, 10, 60000, 6).averaged() != t.averaged());
  CHECK_THROWS_AS(simulate_rounds(p, 0, 10, 1), InvalidArgument);

  DetectorModel det = DetectorModel::ideal(stack.size());
  det.efficiencies.setConstant(0.5);
  const CountsTable half = simulate_rounds(p, 10, 60000, 5, det);
  CHECK(std::abs(half.averaged().sum() - 30000.0) < 5.0 * std::sqrt(3e5) / 10.0);
}

TEST_CASE("Poisson sampling") {
  RngEngine rng = rng_stream(1, kRoundStream, 0);
  RealMatrix means = RealMatrix::Zero(2, 2);
  means(1, 1) = 1e4;
  const CountMatrix c = sample_poisson(means, rng);
  CHECK(c(0, 0) == 0);
  CHECK(std::abs(double(c(1, 1)) - 1e4) < 500);
  means(0, 1) = -1.0;
  CHECK_THROWS_AS(sample_poisson(means, rng), InvalidArgument);
}

TEST_CASE("Monte Carlo basics") {
  const TestState s = test_state("psi2", 6);
  const Fiducial f = principal_branch_fiducial(paired_alpha("psi2", 6), 6);
  const auto effects = build_povm(f);
  const EffectStack stack(effects);
  const InversionOperator op(f);
  const DetectorModel det = DetectorModel::ideal(stack.size());
  const ProbMatrix p = forward_probs(s.density(), stack);

  SUBCASE("single trial has zero sigma") {
    const CountsTable t = simulate_rounds(p, 10, 60000, 3);
    MonteCarloOptions o;
    o.trials = 1;
    const MonteCarloReport r = monte_carlo_fidelity(t, s, op, stack, det, o);
    CHECK(r.sigma == 0.0);
    CHECK(r.mean == r.fidelities[0]);
    const Reconstruction direct = reconstruct(t.averaged(), op, stack, det);
    CHECK(r.mean == fidelity(direct.estimate, s.amplitudes));
  }

  SUBCASE("noiseless large-shot counts") {
    const CountsTable t = CountsTable::from_averaged(1e8 * p.entries());
    MonteCarloOptions o;
    o.trials = 20;
    o.seed = 9;
    const MonteCarloReport r = monte_carlo_fidelity(t, s, op, stack, det, o);
    for (double fid : r.fidelities) CHECK(fid > 0.999);
    CHECK(r.interval_low == doctest::Approx(r.mean - 5 * r.sigma));

    o.threads = 3;
    const MonteCarloReport threaded = monte_carlo_fidelity(t, s, op, stack, det, o);
    CHECK(threaded.fidelities == r.fidelities);
  }

  SUBCASE("raw estimator") {
    const CountsTable t = simulate_rounds(p, 10, 60000, 3);
    const Reconstruction rec = reconstruct(t.averaged(), op, stack, det, {.use_mle = false});
    CHECK((rec.estimate - hermitian_part(rec.linear)).norm() == 0.0);
  }
}
