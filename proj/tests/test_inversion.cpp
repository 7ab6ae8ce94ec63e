// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "mstomo/inversion.hpp"
#include "mstomo/simulator.hpp"
#include "support.hpp"

using namespace mstomo;
using namespace mstomo::testing;

TEST_CASE("probability matrix validation") {
  CHECK_NOTHROW(ProbMatrix(RealMatrix::Constant(3, 3, 1.0 / 9)));
  CHECK_THROWS_AS(ProbMatrix(RealMatrix::Constant(4, 2, 1.0 / 8)), DimensionMismatch);
  CHECK_THROWS_AS(ProbMatrix(RealMatrix::Constant(3, 3, 0.2)), InvalidArgument);
  RealMatrix neg = RealMatrix::Constant(3, 3, 1.0 / 9);
  neg(0, 0) = -0.1;
  neg(0, 1) += 0.1 + 1.0 / 9;
  CHECK_THROWS_AS(ProbMatrix{neg}, InvalidArgument);
}

TEST_CASE("xi vectors agree with the componentwise expansion") {
  std::mt19937_64 rng(29);
  for (int d : {2, 3, 4, 6, 7}) {
    const ComplexVector a = random_unit_vector(d, rng);
    for (int s = 0; s < s_max(d); ++s)
      for (int k = 0; k < d; ++k) CHECK((xi_vector(a, s, k) - xi_oracle(a, s, k)).norm() < 1e-14);
  }
  CHECK_THROWS_AS(xi_vector(ComplexVector::Ones(3), 3, 0), InvalidArgument);
}

TEST_CASE("G maps diagonals of rho to the Fourier-transformed probabilities") {
  std::mt19937_64 rng(31);
  for (int d : {3, 4, 6}) {
    const ComplexVector a = random_unit_vector(d, rng);
    const ComplexMatrix rho = random_density(d, rng);
    const ComplexMatrix pf = probs_oracle(a, rho).cast<std::complex<double>>() * dft_oracle(d);
    for (int m = 0; m < d; ++m)
      CHECK((diagonal_block(a, m) * lower_diagonal(rho, m) - pf.col(m)).norm() < 1e-13);
  }
}

TEST_CASE("G shape and block structure") {
  std::mt19937_64 rng(37);
  const ComplexVector a = random_unit_vector(4, rng);
  const ComplexMatrix g = big_g(a);
  CHECK(g.rows() == 4 * 6);
  CHECK(g.cols() == 16);
  CHECK((g.block(6, 4, 6, 4) - diagonal_block(a, 1)).norm() == 0.0);
  CHECK(g.block(0, 4, 6, 4).isZero());
}

TEST_CASE("diagonal shift map") {
  const ComplexMatrix x = diagonal_shift_map(3);
  CHECK(x.rows() == 9);
  CHECK((x * x.adjoint()).isIdentity(1e-15));
}

TEST_CASE("linear inversion round trip") {
  std::mt19937_64 rng(41);
  for (int d : {2, 3, 5, 6}) {
    const Fiducial f = random_conditioned_fiducial(d, 100.0, rng);
    const InversionOperator op(f);
    CHECK(op.recon_map().rows() == d * d);
    CHECK(op.recon_map().cols() == d * s_max(d));
    const ComplexMatrix rho = random_density(d, rng);
    const ProbMatrix p(probs_oracle(f.amplitudes(), rho));
    CHECK((linear_invert(p, op) - rho).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((blockwise_reconstruction(f.amplitudes(), p.entries()) - rho).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("counts to probabilities") {
  RealMatrix c = RealMatrix::Zero(3, 3);
  c(0, 0) = 3;
  c(2, 1) = 1;
  const ProbMatrix p = counts_to_prob_matrix(c);
  CHECK(p.entries()(0, 0) == 0.75);
  CHECK_THROWS_AS(counts_to_prob_matrix(RealMatrix::Zero(3, 3)), InvalidArgument);
}

TEST_CASE("inversion rejects mismatched dimensions") {
  std::mt19937_64 rng(43);
  const InversionOperator op(random_fiducial(5, rng));
  CHECK_THROWS_AS(linear_invert(ProbMatrix(RealMatrix::Constant(9, 6, 1.0 / 54)), op),
                  DimensionMismatch);
}

TEST_CASE("uniform fiducial is singular") {
  const InversionOperator op(Fiducial::normalized(ComplexVector::Ones(4)));
  CHECK(std::isinf(op.condition_number()));
}

TEST_CASE("pinv(G) is exact for random complex fiducials") {
  // even D with complex amplitudes produces spectra that older divide-and-conquer
  // SVD code deflated incorrectly
  std::mt19937_64 rng(1002);
  for (int d : {4, 6})
    for (int i = 0; i < 40; ++i) {
      const Fiducial f = random_conditioned_fiducial(d, 100.0, rng);
      const ComplexMatrix g = big_g(f);
      CHECK((g * pinv(g) * g - g).norm() < 1e-12);
      CHECK(g_condition_number(f.amplitudes()) == doctest::Approx(cond(g)).epsilon(1e-10));
    }
}
