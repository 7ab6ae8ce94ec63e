// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/counts.hpp"

#include "mstomo/povm.hpp"

namespace mstomo {

namespace {

void check_shape(Eigen::Index rows, Eigen::Index cols) {
  if (cols < 2) throw InvalidArgument("counts: dimension must be at least 2");
  if (rows != s_max(static_cast<int>(cols)))
    throw DimensionMismatch("counts: " + std::to_string(rows) + " rows but s_max(" +
                            std::to_string(cols) + ") = " +
                            std::to_string(s_max(static_cast<int>(cols))));
}

}  // namespace

CountsTable CountsTable::from_rounds(std::vector<CountMatrix> rounds) {
  if (rounds.empty()) throw InvalidArgument("counts: at least one round required");
  const auto rows = rounds.front().rows();
  const auto cols = rounds.front().cols();
  check_shape(rows, cols);
  RealMatrix sum = RealMatrix::Zero(rows, cols);
  for (const auto& r : rounds) {
    if (r.rows() != rows || r.cols() != cols)
      throw DimensionMismatch("counts: rounds have different shapes");
    if ((r.array() < 0).any()) throw InvalidArgument("counts: negative count");
    sum += r.cast<double>();
  }
  CountsTable t;
  t.averaged_ = sum / static_cast<double>(rounds.size());
  t.rounds_ = std::move(rounds);
  return t;
}

CountsTable CountsTable::from_averaged(RealMatrix averaged) {
  check_shape(averaged.rows(), averaged.cols());
  if (!averaged.allFinite() || (averaged.array() < 0.0).any())
    throw InvalidArgument("counts: averaged counts must be finite and non-negative");
  CountsTable t;
  t.averaged_ = std::move(averaged);
  return t;
}

RealVector CountsTable::averaged_flat() const { return flatten_effect_order(averaged_); }

RealVector flatten_effect_order(const RealMatrix& m) {
  RealVector out(m.size());
  for (Eigen::Index s = 0; s < m.rows(); ++s) out.segment(s * m.cols(), m.cols()) = m.row(s);
  return out;
}

RealMatrix unflatten_effect_order(const RealVector& v, int s_max, int dim) {
  if (v.size() != Eigen::Index(s_max) * dim)
    throw DimensionMismatch("unflatten_effect_order: length mismatch");
  RealMatrix out(s_max, dim);
  for (int s = 0; s < s_max; ++s) out.row(s) = v.segment(Eigen::Index(s) * dim, dim);
  return out;
}

}  // namespace mstomo
