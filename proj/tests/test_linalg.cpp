// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "mstomo/linalg.hpp"
#include "support.hpp"

using namespace mstomo;
using namespace mstomo::testing;

TEST_CASE("vec stacks columns") {
  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  const Eigen::Vector4d v = vec(a);
  CHECK(v == Eigen::Vector4d(1, 3, 2, 4));
  CHECK(unvec(v, 2, 2) == a);
  CHECK_THROWS_AS(unvec(v, 3, 2), DimensionMismatch);
  CHECK(unvec(Eigen::VectorXd::Zero(9), 3, 3).isZero());
}

TEST_CASE("vec is sum_l |l> (x) column_l") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_matrix(4, 3, rng);
  ComplexVector expect = ComplexVector::Zero(12);
  for (int l = 0; l < 3; ++l) {
    ComplexVector e = ComplexVector::Zero(3);
    e(l) = 1.0;
    expect += kron(e, a.col(l));
  }
  CHECK((vec(a) - expect).cwiseAbs().maxCoeff() < 1e-15);
  const ComplexVector r = random_matrix(25, 1, rng);
  CHECK(vec(unvec(r, 5, 5)) == r);
}

TEST_CASE("kron and hadamard") {
  Eigen::Matrix2d a, b;
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const Eigen::MatrixXd k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(k(0, 1) == 1);
  CHECK(k(3, 2) == 4);
  CHECK(k(2, 3) == 4);
  CHECK(hadamard(a, b) == (Eigen::Matrix2d() << 0, 2, 3, 0).finished());
  CHECK_THROWS_AS(hadamard(Eigen::MatrixXd(a), Eigen::MatrixXd::Zero(3, 3)), DimensionMismatch);

  std::mt19937_64 rng(5);
  const ComplexMatrix A = random_matrix(2, 3, rng), B = random_matrix(3, 2, rng);
  const ComplexMatrix C = random_matrix(3, 2, rng), E = random_matrix(2, 3, rng);
  CHECK((kron(A, B) * kron(C, E) - kron(A * C, B * E)).norm() < 1e-12);
}

TEST_CASE("fourier matrix") {
  for (int d : {1, 2, 5, 6, 16}) {
    const ComplexMatrix f = fourier(d);
    CHECK((f * f.adjoint() - ComplexMatrix::Identity(d, d)).norm() < 1e-12);
    CHECK(f == f.transpose());
    CHECK((f - dft_oracle(d)).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(std::abs(fourier(2)(1, 1) + 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("swap matrix transposes under vec") {
  std::mt19937_64 rng(7);
  for (int d : {2, 3, 6}) {
    const ComplexMatrix s = swap_matrix(d);
    CHECK((s * s - ComplexMatrix::Identity(d * d, d * d)).isZero());
    const ComplexMatrix a = random_matrix(d, d, rng);
    CHECK((s * vec(a) - vec(ComplexMatrix(a.transpose()))).norm() < 1e-15);
    const ComplexVector x = random_matrix(d, 1, rng), y = random_matrix(d, 1, rng);
    CHECK((s * kron(x, y) - kron(y, x)).norm() < 1e-14);
  }
}

TEST_CASE("shift powers") {
  const ComplexMatrix x = shift_power(5, 1);
  CHECK((shift_power(5, 3) - x * x * x).isZero());
  CHECK((shift_power(5, -1) - x.adjoint()).isZero());
  CHECK(shift_power(5, 5).isIdentity());
}

TEST_CASE("pinv satisfies the Penrose conditions") {
  std::mt19937_64 rng(11);
  const ComplexMatrix a = random_matrix(7, 4, rng) * random_matrix(4, 5, rng);  // rank 4
  const ComplexMatrix p = pinv(a);
  CHECK((a * p * a - a).norm() < 1e-10);
  CHECK((p * a * p - p).norm() < 1e-10);
  CHECK(((a * p).adjoint() - a * p).norm() < 1e-10);
  CHECK(((p * a).adjoint() - p * a).norm() < 1e-10);

  // full column rank: agrees with the normal-equation inverse
  const ComplexMatrix b = random_matrix(9, 4, rng);
  const ComplexMatrix normal = (b.adjoint() * b).inverse() * b.adjoint();
  CHECK((pinv(b) - normal).norm() < 1e-10);

  Eigen::Matrix2d bad;
  bad << 1, std::nan(""), 0, 1;
  CHECK_THROWS_AS(pinv(bad), InvalidArgument);
}

TEST_CASE("condition number") {
  CHECK(cond(Eigen::Matrix2d(Eigen::Vector2d(4, 2).asDiagonal())) == doctest::Approx(2.0));
  CHECK(cond(Eigen::Matrix3d::Identity()) == doctest::Approx(1.0));
  Eigen::Matrix2d singular;
  singular << 1, 2, 2, 4;
  CHECK(std::isinf(cond(singular)));
  CHECK_THROWS_AS(cond(Eigen::Matrix2d::Zero()), InvalidArgument);
}

TEST_CASE("psd projection") {
  Eigen::Matrix2cd a = Eigen::Matrix2cd::Zero();
  a(0, 0) = 1.0;
  a(1, 1) = -0.5;
  const Eigen::Matrix2cd p = psd_project(a);
  CHECK(std::abs(p(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(p(1, 1)) < 1e-15);
  CHECK(min_eigenvalue(a) == doctest::Approx(-0.5));

  std::mt19937_64 rng(13);
  const ComplexMatrix h = random_hermitian(5, rng);
  const ComplexMatrix q = psd_project(h);
  CHECK(min_eigenvalue(q) > -1e-12);
  CHECK((psd_project(q) - q).norm() < 1e-12);
  CHECK((q - q.adjoint()).norm() == 0.0);
}

TEST_CASE("templated on the scalar") {
  const Eigen::MatrixXcf f = fourier<float>(4);
  CHECK((f * f.adjoint() - Eigen::MatrixXcf::Identity(4, 4)).norm() < 1e-5f);
  const Eigen::MatrixXf m = Eigen::MatrixXf::Random(4, 3);
  CHECK((m * pinv(m) * m - m).norm() < 1e-4f);
}
