// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/inversion.hpp"

#include <cmath>
#include <string>

namespace mstomo {

namespace {

int wrap(int i, int dim) { return ((i % dim) + dim) % dim; }

}  // namespace

ProbMatrix::ProbMatrix(RealMatrix entries) : entries_(std::move(entries)) {
  if (entries_.cols() < 2 || entries_.rows() != mstomo::s_max(static_cast<int>(entries_.cols())))
    throw DimensionMismatch("ProbMatrix: shape " + std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()) + " is not s_max x D");
  if (!entries_.allFinite() || (entries_.array() < 0.0).any())
    throw InvalidArgument("ProbMatrix: probabilities must be finite and non-negative");
  if (std::abs(entries_.sum() - 1.0) > kSumTolerance)
    throw InvalidArgument("ProbMatrix: probabilities sum to " + std::to_string(entries_.sum()));
}

ComplexVector xi_vector(const ComplexVector& a, int s, int k) {
  const int dim = static_cast<int>(a.size());
  if (s < 0 || s >= s_max(dim) || k < 0 || k >= dim)
    throw InvalidArgument("xi_vector: index (" + std::to_string(s) + ", " + std::to_string(k) +
                          ") out of range");
  const ComplexVector v = phase_diagonal(dim, s);
  ComplexVector xi(dim);
  for (int q = 0; q < dim; ++q) {
    xi(q) = a(wrap(q - s + k, dim)) * std::conj(a(wrap(q - s, dim))) * v(wrap(q + k, dim)) *
            std::conj(v(q));
  }
  return xi;
}

ComplexMatrix diagonal_block(const ComplexVector& a, int k) {
  const int dim = static_cast<int>(a.size());
  const int smax = s_max(dim);
  ComplexMatrix block(smax, dim);
  const double root_d = std::sqrt(static_cast<double>(dim));
  for (int s = 0; s < smax; ++s)
    block.row(s) = (root_d / k_weight(dim, s)) * xi_vector(a, s, k).adjoint();
  return block;
}

ComplexMatrix big_g(const ComplexVector& a) {
  const int dim = static_cast<int>(a.size());
  const int smax = s_max(dim);
  ComplexMatrix g = ComplexMatrix::Zero(Eigen::Index(dim) * smax, Eigen::Index(dim) * dim);
  for (int m = 0; m < dim; ++m) g.block(m * smax, m * dim, smax, dim) = diagonal_block(a, m);
  return g;
}

ComplexMatrix big_g(const Fiducial& f) { return big_g(f.amplitudes()); }

RealVector g_singular_values(const ComplexVector& a) {
  const int dim = static_cast<int>(a.size());
  RealVector sv(Eigen::Index(dim) * dim);
  for (int m = 0; m < dim; ++m) sv.segment(Eigen::Index(m) * dim, dim) = singular_values(diagonal_block(a, m));
  return sv;
}

double g_condition_number(const ComplexVector& a) {
  const int dim = static_cast<int>(a.size());
  return cond_from_singular_values(g_singular_values(a), Eigen::Index(dim) * s_max(dim),
                                   Eigen::Index(dim) * dim);
}

ComplexMatrix diagonal_shift_map(int dim) {
  ComplexMatrix out = ComplexMatrix::Zero(Eigen::Index(dim) * dim, Eigen::Index(dim) * dim);
  for (int m = 0; m < dim; ++m) {
    ComplexMatrix proj = ComplexMatrix::Zero(dim, dim);
    proj(m, m) = 1.0;
    out += kron(shift_power(dim, m), proj);
  }
  return out;
}

InversionOperator::InversionOperator(Fiducial fiducial, std::optional<double> pinv_rel_tol)
    : fiducial_(std::move(fiducial)), s_max_(mstomo::s_max(fiducial_.dim())) {
  const int dim = fiducial_.dim();
  g_ = big_g(fiducial_);
  g_pinv_ = pinv(g_, pinv_rel_tol);
  cond_ = g_condition_number(fiducial_.amplitudes());
  const ComplexMatrix fourier_side = kron(fourier(dim), ComplexMatrix::Identity(s_max_, s_max_));
  recon_map_ = swap_matrix(dim) * diagonal_shift_map(dim) * g_pinv_ * fourier_side;
}

ProbMatrix counts_to_prob_matrix(const RealMatrix& counts) {
  if (!counts.allFinite() || (counts.array() < 0.0).any())
    throw InvalidArgument("counts_to_prob_matrix: counts must be finite and non-negative");
  const double total = counts.sum();
  if (!(total > 0.0)) throw InvalidArgument("counts_to_prob_matrix: all counts are zero");
  return ProbMatrix(counts / total);
}

ProbMatrix counts_to_prob_matrix(const CountsTable& counts) {
  return counts_to_prob_matrix(counts.averaged());
}

ComplexMatrix linear_invert(const ProbMatrix& p, const InversionOperator& op) {
  if (p.dim() != op.dim())
    throw DimensionMismatch("linear_invert: probability matrix is for D = " +
                            std::to_string(p.dim()) + ", operator for D = " +
                            std::to_string(op.dim()));
  const ComplexVector vp = vec(p.entries()).cast<std::complex<double>>();
  return unvec(op.recon_map() * vp, op.dim(), op.dim());
}

}  // namespace mstomo
