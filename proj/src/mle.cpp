// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mstomo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBacktracks = 80;

void check_counts(const RealVector& counts, const EffectStack& effects) {
  if (counts.size() != effects.size())
    throw DimensionMismatch("mle: " + std::to_string(counts.size()) + " counts for " +
                            std::to_string(effects.size()) + " effects");
  if (!counts.allFinite() || (counts.array() < 0.0).any())
    throw InvalidArgument("mle: counts must be finite and non-negative");
}

// u - log1p(u), accurate near u = 0
double excess_log(double u) {
  if (std::abs(u) > 0.25) return u - std::log1p(u);
  double term = -u, sum = 0.0;
  for (int k = 2; k < 40; ++k) {
    term *= -u;
    const double next = sum + term / k;
    if (next == sum) break;
    sum = next;
  }
  return sum;
}

void check_square(const ComplexMatrix& m, const EffectStack& effects, const char* who) {
  if (m.rows() != effects.dim() || m.cols() != effects.dim())
    throw DimensionMismatch(std::string(who) + ": operator dimension differs from effects");
}

// Negative log-likelihood split as deviance + constant. The deviance terms
// vanish at N = n, so differences between nearby iterates keep full precision.
class PoissonObjective {
 public:
  PoissonObjective(const RealVector& counts, const EffectStack& effects, const DetectorModel& det)
      : counts_(counts), effects_(effects), det_(det) {
    check_counts(counts_, effects_);
    det_.validate(effects_.size());
    saturated_ = 0.0;
    for (Eigen::Index j = 0; j < counts_.size(); ++j) {
      const double n = counts_(j);
      saturated_ += std::lgamma(n + 1.0);
      if (n > 0.0) saturated_ += n - n * std::log(n);
    }
    frob2_ = effects_.rows().rowwise().squaredNorm();
  }

  RealVector expected(const ComplexMatrix& varrho) const {
    return det_.efficiencies.cwiseProduct(effects_.traces(varrho)) + det_.dark_counts;
  }

  // +inf when an outcome with counts is predicted to be impossible
  double deviance_or_inf(const ComplexMatrix& varrho) const {
    const RealVector n_th = expected(varrho);
    double total = 0.0;
    for (Eigen::Index j = 0; j < n_th.size(); ++j) {
      const double n = counts_(j);
      if (n > 0.0) {
        if (!(n_th(j) > 0.0)) return kInf;
        total += n * excess_log((n_th(j) - n) / n);
      } else {
        total += n_th(j);
      }
    }
    return total;
  }

  double deviance(const ComplexMatrix& varrho) const {
    const double v = deviance_or_inf(varrho);
    if (v == kInf)
      throw NonpositiveExpectedCount("expected count is not positive for an observed outcome");
    return v;
  }

  double value(const ComplexMatrix& varrho) const { return deviance(varrho) + saturated_; }
  double saturated() const { return saturated_; }

  ComplexMatrix gradient(const ComplexMatrix& varrho) const {
    const RealVector n_th = expected(varrho);
    RealVector w(n_th.size());
    for (Eigen::Index j = 0; j < n_th.size(); ++j) {
      if (counts_(j) > 0.0) {
        if (!(n_th(j) > 0.0))
          throw NonpositiveExpectedCount("expected count is not positive for an observed outcome");
        w(j) = det_.efficiencies(j) * (1.0 - counts_(j) / n_th(j));
      } else {
        w(j) = det_.efficiencies(j);
      }
    }
    return hermitian_part(effects_.weighted_sum(w));
  }

  // trace of the Hessian, an upper bound on its largest eigenvalue
  double hessian_trace(const ComplexMatrix& varrho) const {
    const RealVector n_th = expected(varrho);
    double tr = 0.0;
    for (Eigen::Index j = 0; j < n_th.size(); ++j)
      if (counts_(j) > 0.0 && n_th(j) > 0.0) {
        const double eta = det_.efficiencies(j);
        tr += eta * eta * counts_(j) / (n_th(j) * n_th(j)) * frob2_(j);
      }
    return tr;
  }

  double total_counts() const { return counts_.sum(); }

 private:
  const RealVector& counts_;
  const EffectStack& effects_;
  const DetectorModel& det_;
  double saturated_;
  RealVector frob2_;
};

double trace_real(const ComplexMatrix& m) { return m.trace().real(); }

}  // namespace

DetectorModel DetectorModel::ideal(Eigen::Index outcomes) {
  return DetectorModel{RealVector::Ones(outcomes), RealVector::Zero(outcomes)};
}

void DetectorModel::validate(Eigen::Index outcomes) const {
  if (efficiencies.size() != outcomes || dark_counts.size() != outcomes)
    throw DimensionMismatch("DetectorModel: expected " + std::to_string(outcomes) +
                            " efficiencies and dark counts");
  if (!efficiencies.allFinite() || (efficiencies.array() <= 0.0).any())
    throw InvalidArgument("DetectorModel: efficiencies must be positive");
  if (!dark_counts.allFinite() || (dark_counts.array() < 0.0).any())
    throw InvalidArgument("DetectorModel: dark counts must be non-negative");
}

void MleOptions::validate() const {
  if (max_iters <= 0) throw InvalidArgument("MleOptions: max_iters must be positive");
  if (!(gradient_tolerance > 0.0)) throw InvalidArgument("MleOptions: tolerance must be positive");
  if (!(refine_tolerance > 0.0)) throw InvalidArgument("MleOptions: refine_tolerance must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0))
    throw InvalidArgument("MleOptions: step_shrink must lie in (0, 1)");
  if (initial_step && !(*initial_step > 0.0))
    throw InvalidArgument("MleOptions: initial_step must be positive");
}

RealVector expected_counts(const ComplexMatrix& varrho, const EffectStack& effects,
                           const DetectorModel& det) {
  check_square(varrho, effects, "expected_counts");
  det.validate(effects.size());
  return det.efficiencies.cwiseProduct(effects.traces(varrho)) + det.dark_counts;
}

double neg_log_likelihood(const ComplexMatrix& varrho, const RealVector& counts,
                          const EffectStack& effects, const DetectorModel& det) {
  check_square(varrho, effects, "neg_log_likelihood");
  return PoissonObjective(counts, effects, det).value(varrho);
}

ComplexMatrix nll_gradient(const ComplexMatrix& varrho, const RealVector& counts,
                           const EffectStack& effects, const DetectorModel& det) {
  check_square(varrho, effects, "nll_gradient");
  return PoissonObjective(counts, effects, det).gradient(varrho);
}

ComplexMatrix mle_initial_guess(const ComplexMatrix& linear_estimate, double total_counts) {
  const auto dim = linear_estimate.rows();
  ComplexMatrix guess = psd_project(linear_estimate);
  const double tr = trace_real(guess);
  if (!(tr > 0.0) || !guess.allFinite())
    return ComplexMatrix::Identity(dim, dim) * (total_counts / static_cast<double>(dim));
  return guess * (total_counts / tr);
}

MleResult mle_estimate(const RealVector& counts, const EffectStack& effects,
                       const DetectorModel& det, const ComplexMatrix& init,
                       const MleOptions& opts) {
  opts.validate();
  check_square(init, effects, "mle_estimate");
  const PoissonObjective objective(counts, effects, det);
  const double total = objective.total_counts();
  if (!(total > 0.0)) throw InvalidArgument("mle_estimate: all counts are zero");
  const auto dim = init.rows();

  ComplexMatrix x = psd_project(init);
  double fx = objective.deviance_or_inf(x);
  if (!(trace_real(x) > 0.0) || fx == kInf) {
    x = ComplexMatrix::Identity(dim, dim) * (total / static_cast<double>(dim));
    fx = objective.deviance(x);
  }
  ComplexMatrix grad = objective.gradient(x);

  MleResult result;
  result.nll_history.push_back(fx);
  result.min_iterate_eigenvalue = min_eigenvalue(x);

  double step = 0.0;
  if (opts.initial_step) {
    step = *opts.initial_step;
  } else {
    const double h = objective.hessian_trace(x);
    step = h > 0.0 ? 1.0 / h : trace_real(x);
  }

  const double tolerance = opts.gradient_tolerance * total;
  const double refine = std::min(opts.refine_tolerance, opts.gradient_tolerance) * total;
  auto projected_gradient_norm = [&](const ComplexMatrix& at, const ComplexMatrix& g) {
    const double scale = std::max(trace_real(at), total * 1e-12);
    return (at - psd_project(at - scale * g)).norm();
  };

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (projected_gradient_norm(x, grad) < refine) break;
    double t = step;
    ComplexMatrix candidate;
    double fc = kInf;
    bool accepted = false;
    for (int b = 0; b < kMaxBacktracks; ++b) {
      candidate = psd_project(x - t * grad);
      fc = objective.deviance_or_inf(candidate);
      if (fc < fx) {
        accepted = true;
        break;
      }
      t *= opts.step_shrink;
    }
    // no representable decrease left: the iterate is as good as it gets
    if (!accepted) break;

    const ComplexMatrix next_grad = objective.gradient(candidate);
    const ComplexMatrix ds = candidate - x;
    const ComplexMatrix dg = next_grad - grad;
    const double sy = ds.cwiseProduct(dg.conjugate()).sum().real();
    const double ss = ds.squaredNorm();
    // Barzilai-Borwein trial step for the next iteration
    step = (sy > 0.0 && ss > 0.0) ? ss / sy : t / opts.step_shrink;

    x = candidate;
    fx = fc;
    grad = next_grad;
    result.nll_history.push_back(fx);
    result.min_iterate_eigenvalue = std::min(result.min_iterate_eigenvalue, min_eigenvalue(x));
  }
  const bool converged = projected_gradient_norm(x, grad) < tolerance;

  result.varrho = x;
  result.unnormalized_trace = trace_real(x);
  result.rho = x / result.unnormalized_trace;
  result.final_nll = fx + objective.saturated();
  result.iterations = it;
  result.converged = converged;
  return result;
}

}  // namespace mstomo
