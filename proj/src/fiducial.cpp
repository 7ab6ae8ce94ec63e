// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/fiducial.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mstomo/inversion.hpp"
#include "mstomo/parallel.hpp"

namespace mstomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// |sin| below this at the denominator counts as an exact zero
constexpr double kSingularSin = 1e-13;

void check_dim(int dim) {
  if (dim < 2) throw InvalidArgument("fiducial: dimension must be at least 2");
}

void check_axis(const RealVector& axis, const char* name) {
  if (axis.size() == 0) throw InvalidArgument(std::string("scan_grid: empty ") + name + " axis");
  if (!axis.allFinite()) throw InvalidArgument(std::string("scan_grid: non-finite ") + name);
  for (Eigen::Index i = 1; i < axis.size(); ++i)
    if (!(axis(i) > axis(i - 1)))
      throw InvalidArgument(std::string("scan_grid: ") + name + " axis is not strictly increasing");
}

}  // namespace

AlphaParam AlphaParam::polar(double magnitude, double phase) {
  if (!std::isfinite(magnitude) || magnitude < 0.0)
    throw InvalidArgument("alpha: magnitude must be finite and non-negative");
  if (!std::isfinite(phase)) throw InvalidArgument("alpha: phase must be finite");
  double reduced = std::fmod(phase, kTwoPi);
  if (reduced < 0.0) reduced += kTwoPi;
  if (reduced >= kTwoPi) reduced = 0.0;
  return AlphaParam{magnitude, reduced};
}

LambdaProfile lambda_profile(const AlphaParam& alpha, int dim) {
  check_dim(dim);
  const double d = dim;
  LambdaProfile out;
  out.dim = dim;
  out.lambdas.resize(dim);
  for (int k = 0; k < dim; ++k) {
    const double num_arg = (k * std::numbers::pi + (d - 1.0) * alpha.phase) / d;
    const double den_arg = (k * std::numbers::pi - alpha.phase) / d;
    const double num = std::sin(num_arg);
    const double den = std::sin(den_arg);
    double ratio;
    if (std::abs(den) < kSingularSin) {
      if (std::abs(num) > 1e-9)
        throw NumericalError("lambda_profile: pole at k = " + std::to_string(k));
      // d/d(arg) of numerator over d/d(arg) of denominator
      ratio = -(d - 1.0) * std::cos(num_arg) / std::cos(den_arg);
    } else {
      ratio = num / den;
    }
    out.lambdas(k) = 1.0 - alpha.magnitude * ratio;
  }
  out.valid = (out.lambdas.array() >= -LambdaProfile::kNegativityTolerance).all();
  return out;
}

Fiducial equidistant_fiducial(const AlphaParam& alpha, int dim) {
  const LambdaProfile profile = lambda_profile(alpha, dim);
  if (!profile.valid) {
    std::ostringstream msg;
    msg << "alpha = " << alpha.magnitude << " exp(" << alpha.phase / std::numbers::pi
        << " pi i) gives negative lambda for D = " << dim << ":";
    for (int k = 0; k < dim; ++k)
      if (profile.lambdas(k) < -LambdaProfile::kNegativityTolerance)
        msg << " lambda_" << k << " = " << profile.lambdas(k);
    throw InvalidAlphaRegion(msg.str());
  }
  ComplexVector a(dim);
  for (int k = 0; k < dim; ++k) a(k) = std::sqrt(std::max(profile.lambdas(k), 0.0) / dim);
  return Fiducial(std::move(a));
}

ComplexVector complex_amplitudes(const AlphaParam& alpha, int dim) {
  const LambdaProfile profile = lambda_profile(alpha, dim);
  ComplexVector a(dim);
  for (int k = 0; k < dim; ++k) a(k) = std::sqrt(std::complex<double>(profile.lambdas(k) / dim, 0.0));
  return a;
}

Fiducial principal_branch_fiducial(const AlphaParam& alpha, int dim) {
  return Fiducial::normalized(complex_amplitudes(alpha, dim));
}

double condition_number(const ComplexVector& amplitudes, int dim) {
  if (amplitudes.size() != dim)
    throw DimensionMismatch("condition_number: expected " + std::to_string(dim) + " amplitudes");
  check_dim(dim);
  if (amplitudes.cwiseAbs().maxCoeff() == 0.0) return std::numeric_limits<double>::infinity();
  return g_condition_number(amplitudes);
}

ScanGrid scan_grid(int dim, const RealVector& magnitudes, const RealVector& phases,
                   unsigned threads) {
  check_dim(dim);
  check_axis(magnitudes, "magnitude");
  check_axis(phases, "phase");
  ScanGrid grid;
  grid.magnitudes = magnitudes;
  grid.phases = phases;
  grid.log10_cond.resize(magnitudes.size(), phases.size());
  grid.valid.resize(magnitudes.size(), phases.size());
  const auto n_phase = static_cast<std::size_t>(phases.size());
  const std::size_t cells = static_cast<std::size_t>(magnitudes.size()) * n_phase;
  parallel_for(cells, threads, [&](std::size_t cell) {
    const auto i = static_cast<Eigen::Index>(cell / n_phase);
    const auto j = static_cast<Eigen::Index>(cell % n_phase);
    double value = std::numeric_limits<double>::infinity();
    bool valid = false;
    try {
      const AlphaParam alpha = AlphaParam::polar(magnitudes(i), phases(j));
      valid = lambda_profile(alpha, dim).valid;
      value = std::log10(condition_number(complex_amplitudes(alpha, dim), dim));
    } catch (const Error&) {
      value = std::numeric_limits<double>::infinity();
    }
    if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
    grid.log10_cond(i, j) = value;
    grid.valid(i, j) = valid;
  });
  return grid;
}

FiducialSearchResult random_fiducial_search(int dim, std::size_t n_samples, std::uint64_t seed,
                                            unsigned threads) {
  check_dim(dim);
  if (n_samples < 1) throw InvalidArgument("random_fiducial_search: need at least one sample");
  std::vector<ComplexVector> samples(n_samples);
  std::vector<double> conds(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    RngEngine rng = rng_stream(seed, kFiducialStream, i);
    std::normal_distribution<double> normal;
    RealVector p(dim);
    for (int k = 0; k < dim; ++k) {
      const double z = normal(rng);
      p(k) = z * z;
    }
    p /= p.sum();
    ComplexVector a = p.cwiseSqrt().cast<std::complex<double>>();
    a /= a.norm();
    conds[i] = condition_number(a, dim);
    samples[i] = std::move(a);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < n_samples; ++i)
    if (conds[i] < conds[best]) best = i;
  return FiducialSearchResult{Fiducial(samples[best]), conds[best], best};
}

}  // namespace mstomo
