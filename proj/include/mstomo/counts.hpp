// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "mstomo/linalg.hpp"

namespace mstomo {

/// Integer counts n_sj of one measurement round, shape s_max x D.
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Raw per-round counts and their entrywise mean.
class CountsTable {
 public:
  /// Averages the rounds. Throws on empty input, shape mismatch or negative
  /// counts.
  static CountsTable from_rounds(std::vector<CountMatrix> rounds);

  /// A table that only carries (possibly fractional) averaged counts.
  static CountsTable from_averaged(RealMatrix averaged);

  int dim() const noexcept { return static_cast<int>(averaged_.cols()); }
  int s_max() const noexcept { return static_cast<int>(averaged_.rows()); }
  const std::vector<CountMatrix>& rounds() const noexcept { return rounds_; }
  const RealMatrix& averaged() const noexcept { return averaged_; }

  /// Averaged counts flattened in effect order (s outer, j inner).
  RealVector averaged_flat() const;

 private:
  CountsTable() = default;

  std::vector<CountMatrix> rounds_;
  RealMatrix averaged_;
};

/// Flattens an s_max x D matrix in effect order (s outer, j inner).
RealVector flatten_effect_order(const RealMatrix& m);

/// Inverse of flatten_effect_order.
RealMatrix unflatten_effect_order(const RealVector& v, int s_max, int dim);

}  // namespace mstomo
