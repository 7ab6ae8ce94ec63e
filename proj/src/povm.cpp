// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/povm.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mstomo {

namespace {

std::complex<double> root_of_unity(int dim, long long power) {
  const long long p = ((power % dim) + dim) % dim;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) / dim);
}

void check_dim(int dim, const char* who) {
  if (dim < 2) throw InvalidArgument(std::string(who) + ": dimension must be at least 2");
}

}  // namespace

Fiducial::Fiducial(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) throw InvalidFiducial("fiducial needs at least two amplitudes");
  if (!amplitudes_.allFinite()) throw InvalidFiducial("fiducial has non-finite amplitudes");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance)
    throw InvalidFiducial("fiducial is not normalized: sum |a_k|^2 = " + std::to_string(norm2));
}

Fiducial Fiducial::normalized(const ComplexVector& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidFiducial("cannot normalize fiducial");
  return Fiducial(amplitudes / n);
}

GeneratorSet generators(int dim) {
  check_dim(dim, "generators");
  GeneratorSet g;
  g.dim = dim;
  g.kappa = dim / 2;
  g.shift = shift_power(dim, 1);
  g.clock = ComplexMatrix::Zero(dim, dim);
  g.phase = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    g.clock(k, k) = root_of_unity(dim, k);
    g.phase(k, k) = k < g.kappa ? std::complex<double>(1.0) : std::complex<double>(0.0, -1.0);
  }
  return g;
}

int s_max(int dim) {
  check_dim(dim, "s_max");
  return dim % 2 == 1 ? dim : 3 * dim / 2;
}

int k_weight(int dim, int s) {
  const int smax = s_max(dim);
  if (s < 0 || s >= smax)
    throw InvalidArgument("k_weight: s = " + std::to_string(s) + " outside [0, " +
                          std::to_string(smax) + ")");
  if (dim % 2 == 1) return dim;
  const int kappa = dim / 2;
  return (s >= kappa && s <= dim - 1) ? dim : 2 * dim;
}

ComplexVector phase_diagonal(int dim, int s) {
  check_dim(dim, "phase_diagonal");
  const int power = (s / dim) % 4;
  const int kappa = dim / 2;
  // (-i)^power on the lower block
  static constexpr std::complex<double> kMinusIPowers[4] = {
      {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
  ComplexVector v = ComplexVector::Ones(dim);
  for (int k = kappa; k < dim; ++k) v(k) = kMinusIPowers[power];
  return v;
}

ComplexVector ms_state(const Fiducial& f, int s, int j) {
  const int dim = f.dim();
  const int smax = s_max(dim);
  if (s < 0 || s >= smax || j < 0 || j >= dim)
    throw InvalidArgument("ms_state: index (" + std::to_string(s) + ", " + std::to_string(j) +
                          ") out of range");
  const ComplexVector v = phase_diagonal(dim, s);
  const auto& a = f.amplitudes();
  ComplexVector out(dim);
  for (int k = 0; k < dim; ++k) {
    const int target = (k + s) % dim;
    out(target) = a(k) * v(target) * root_of_unity(dim, static_cast<long long>(j) * k);
  }
  return out;
}

std::vector<Effect> build_povm(const Fiducial& f) {
  const int dim = f.dim();
  const int smax = s_max(dim);
  std::vector<Effect> effects;
  effects.reserve(static_cast<std::size_t>(smax) * dim);
  for (int s = 0; s < smax; ++s) {
    const int kw = k_weight(dim, s);
    for (int j = 0; j < dim; ++j) {
      Effect e;
      e.s = s;
      e.j = j;
      e.k_weight = kw;
      e.state = ms_state(f, s, j);
      e.matrix = e.state * e.state.adjoint() / static_cast<double>(kw);
      effects.push_back(std::move(e));
    }
  }
  return effects;
}

double completeness_residual(std::span<const Effect> effects) {
  if (effects.empty()) throw InvalidArgument("completeness_residual: no effects");
  const Eigen::Index dim = effects.front().matrix.rows();
  ComplexMatrix total = -ComplexMatrix::Identity(dim, dim);
  for (const auto& e : effects) {
    if (e.matrix.rows() != dim || e.matrix.cols() != dim)
      throw DimensionMismatch("completeness_residual: effects have different dimensions");
    total += e.matrix;
  }
  return total.cwiseAbs().maxCoeff();
}

EffectStack::EffectStack(std::span<const Effect> effects) {
  if (effects.empty()) throw InvalidArgument("EffectStack: no effects");
  dim_ = static_cast<int>(effects.front().matrix.rows());
  rows_.resize(static_cast<Eigen::Index>(effects.size()), Eigen::Index(dim_) * dim_);
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const auto& m = effects[i].matrix;
    if (m.rows() != dim_ || m.cols() != dim_)
      throw DimensionMismatch("EffectStack: effects have different dimensions");
    rows_.row(static_cast<Eigen::Index>(i)) = vec(m).adjoint();
  }
}

RealVector EffectStack::traces(const ComplexMatrix& a) const {
  if (a.rows() != dim_ || a.cols() != dim_)
    throw DimensionMismatch("EffectStack::traces: operand dimension differs from effects");
  const Eigen::Map<const ComplexVector> va(a.data(), a.size());
  return (rows_ * va).real();
}

ComplexMatrix EffectStack::weighted_sum(const RealVector& weights) const {
  if (weights.size() != rows_.rows())
    throw DimensionMismatch("EffectStack::weighted_sum: one weight per effect required");
  const ComplexVector v = rows_.adjoint() * weights.cast<std::complex<double>>();
  // rows hold vec(Pi)^dagger, so the adjoint product gives vec(sum w Pi)
  return unvec(v, dim_, dim_);
}

}  // namespace mstomo
