// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mstomo {

namespace {

ComplexVector phased_uniform(std::span<const double> phases_over_pi) {
  const auto dim = static_cast<Eigen::Index>(phases_over_pi.size());
  ComplexVector v(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index k = 0; k < dim; ++k)
    v(k) = std::polar(amp, std::numbers::pi * phases_over_pi[static_cast<std::size_t>(k)]);
  return v;
}

ComplexVector basis_vector(int dim, int k) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return v;
}

}  // namespace

TestState test_state(const std::string& name, int dim) {
  if (dim == 6) {
    if (name == "psi1") return {name, ComplexVector::Constant(6, 1.0 / std::sqrt(6.0))};
    if (name == "psi2") return {name, basis_vector(6, 0)};
    if (name == "psi3") {
      constexpr double p[6] = {0.0, -1.0 / 8, 0.0, -1.0 / 8, -1.0 / 4, -1.0 / 8};
      return {name, phased_uniform(p)};
    }
  } else if (dim == 15) {
    if (name == "psi1") return {name, ComplexVector::Constant(15, 1.0 / std::sqrt(15.0))};
    if (name == "psi2") return {name, basis_vector(15, 7)};
    if (name == "psi3") {
      double p[15] = {};
      for (int k : {1, 3, 9, 12}) p[k] = -1.0 / 10;
      p[2] = -1.0 / 9;
      for (int k : {6, 11}) p[k] = -1.0 / 8;
      for (int k : {4, 10}) p[k] = -1.0 / 7;
      for (int k : {7, 13}) p[k] = -1.0 / 6;
      return {name, phased_uniform(p)};
    }
  }
  throw InvalidArgument("no test state '" + name + "' for D = " + std::to_string(dim));
}

TestState custom_state(std::string name, ComplexVector amplitudes) {
  if (amplitudes.size() < 2 || !amplitudes.allFinite())
    throw InvalidArgument("custom state needs at least two finite amplitudes");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-9)
    throw InvalidArgument("custom state is not normalized");
  return {std::move(name), std::move(amplitudes)};
}

AlphaParam paired_alpha(const std::string& name, int dim) {
  const double pi = std::numbers::pi;
  if (dim == 6) {
    if (name == "psi1") return AlphaParam::polar(0.4, 1.7 * pi);
    if (name == "psi2") return AlphaParam::polar(0.8, 0.36 * pi);
    if (name == "psi3") return AlphaParam::polar(0.5, 0.5 * pi);
  } else if (dim == 15) {
    if (name == "psi1") return AlphaParam::polar(0.365, pi);
    if (name == "psi2") return AlphaParam::polar(0.54, 0.4 * pi);
    if (name == "psi3") return AlphaParam::polar(0.98, 1.42 * pi);
  }
  throw InvalidArgument("no paired alpha for state '" + name + "' and D = " +
                        std::to_string(dim));
}

ProbMatrix forward_probs(const ComplexMatrix& rho, const EffectStack& effects) {
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-6)
    throw InvalidArgument("forward_probs: density matrix has trace " + std::to_string(tr));
  RealVector p = effects.traces(rho).cwiseMax(0.0);
  const int dim = effects.dim();
  return ProbMatrix(unflatten_effect_order(p, static_cast<int>(p.size() / dim), dim));
}

CountMatrix sample_poisson(const RealMatrix& means, RngEngine& rng) {
  CountMatrix out(means.rows(), means.cols());
  for (Eigen::Index s = 0; s < means.rows(); ++s)
    for (Eigen::Index j = 0; j < means.cols(); ++j) {
      const double mean = means(s, j);
      if (!std::isfinite(mean) || mean < 0.0)
        throw InvalidArgument("sample_poisson: means must be finite and non-negative");
      if (mean == 0.0) {
        out(s, j) = 0;
      } else {
        std::poisson_distribution<std::int64_t> draw(mean);
        out(s, j) = draw(rng);
      }
    }
  return out;
}

CountMatrix sample_round_counts(const ProbMatrix& p, std::int64_t shots, RngEngine& rng) {
  if (shots < 1) throw InvalidArgument("sample_round_counts: shots must be positive");
  return sample_poisson(static_cast<double>(shots) * p.entries(), rng);
}

CountsTable average_counts(std::vector<CountMatrix> rounds) {
  return CountsTable::from_rounds(std::move(rounds));
}

CountsTable simulate_rounds(const ProbMatrix& p, int rounds, std::int64_t shots,
                            std::uint64_t seed) {
  return simulate_rounds(p, rounds, shots, seed,
                         DetectorModel::ideal(Eigen::Index(p.s_max()) * p.dim()));
}

CountsTable simulate_rounds(const ProbMatrix& p, int rounds, std::int64_t shots,
                            std::uint64_t seed, const DetectorModel& det) {
  if (rounds < 1) throw InvalidArgument("simulate_rounds: need at least one round");
  if (shots < 1) throw InvalidArgument("simulate_rounds: shots must be positive");
  det.validate(Eigen::Index(p.s_max()) * p.dim());
  const RealMatrix means =
      unflatten_effect_order(det.efficiencies.cwiseProduct(static_cast<double>(shots) *
                                                           flatten_effect_order(p.entries())) +
                                 det.dark_counts,
                             p.s_max(), p.dim());
  std::vector<CountMatrix> all;
  all.reserve(static_cast<std::size_t>(rounds));
  for (int r = 0; r < rounds; ++r) {
    RngEngine rng = rng_stream(seed, kRoundStream, static_cast<std::uint64_t>(r));
    all.push_back(sample_poisson(means, rng));
  }
  return average_counts(std::move(all));
}

double fidelity(const ComplexMatrix& rho, const ComplexVector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size())
    throw DimensionMismatch("fidelity: state and density matrix dimensions differ");
  const double f = psi.dot(rho * psi).real();
  return std::clamp(f, 0.0, 1.0);
}

Reconstruction reconstruct(const RealMatrix& counts, const InversionOperator& op,
                           const EffectStack& effects, const DetectorModel& det,
                           const ReconstructOptions& opts) {
  if (counts.cols() != op.dim() || counts.rows() != op.s_max())
    throw DimensionMismatch("reconstruct: counts are " + std::to_string(counts.rows()) + "x" +
                            std::to_string(counts.cols()) + ", fiducial expects " +
                            std::to_string(op.s_max()) + "x" + std::to_string(op.dim()));
  Reconstruction out;
  out.linear = linear_invert(counts_to_prob_matrix(counts), op);
  const ComplexMatrix herm = hermitian_part(out.linear);
  out.min_linear_eigenvalue = min_eigenvalue(herm);
  if (!opts.use_mle) {
    out.estimate = herm;
    return out;
  }
  const RealVector n = flatten_effect_order(counts);
  const MleResult mle =
      mle_estimate(n, effects, det, mle_initial_guess(herm, n.sum()), opts.mle);
  out.estimate = mle.rho;
  out.converged = mle.converged;
  out.iterations = mle.iterations;
  return out;
}

MonteCarloReport monte_carlo_fidelity(const CountsTable& counts, const TestState& target,
                                      const InversionOperator& op, const EffectStack& effects,
                                      const DetectorModel& det, const MonteCarloOptions& opts) {
  if (opts.trials < 1) throw InvalidArgument("monte_carlo_fidelity: need at least one trial");
  if (target.dim() != op.dim())
    throw DimensionMismatch("monte_carlo_fidelity: target state dimension differs from fiducial");
  const RealMatrix& nbar = counts.averaged();

  MonteCarloReport report;
  report.trials = opts.trials;
  report.fidelities.assign(opts.trials, 0.0);
  std::vector<char> converged(opts.trials, 0);
  ComplexMatrix point;

  parallel_for(opts.trials, opts.threads, [&](std::size_t mu) {
    RealMatrix n = nbar;
    if (mu > 0) {
      RngEngine rng = rng_stream(opts.seed, kTrialStream, mu);
      n = sample_poisson(nbar, rng).cast<double>();
    }
    bool ok = true;
    ComplexMatrix rho;
    try {
      const Reconstruction rec = reconstruct(n, op, effects, det, opts.reconstruct);
      rho = rec.estimate;
      ok = rec.converged;
    } catch (const NumericalError&) {
      // keep the trial, flagged, with the projected linear estimate
      rho = mle_initial_guess(linear_invert(counts_to_prob_matrix(n), op), 1.0);
      ok = false;
    }
    report.fidelities[mu] = fidelity(rho, target.amplitudes);
    converged[mu] = ok ? 1 : 0;
    if (mu == 0) point = std::move(rho);
  });

  report.converged.assign(converged.begin(), converged.end());
  report.point_estimate = std::move(point);
  double sum = 0.0;
  for (double f : report.fidelities) sum += f;
  report.mean = sum / static_cast<double>(opts.trials);
  if (opts.trials > 1) {
    double ss = 0.0;
    for (double f : report.fidelities) ss += (f - report.mean) * (f - report.mean);
    report.sigma = std::sqrt(ss / static_cast<double>(opts.trials - 1));
  }
  report.interval_low = report.mean - 5.0 * report.sigma;
  report.interval_high = report.mean + 5.0 * report.sigma;
  return report;
}

}  // namespace mstomo
