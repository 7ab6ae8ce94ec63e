// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/commands.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "mstomo/inversion.hpp"
#include "mstomo/io.hpp"
#include "mstomo/simulator.hpp"

namespace mstomo::cli {

using nlohmann::json;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const InvalidAlphaRegion& e) {
    err << "error: invalid fiducial: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

DetectorModel uniform_detector(Eigen::Index outcomes, double efficiency, double dark) {
  return DetectorModel{RealVector::Constant(outcomes, efficiency), RealVector::Constant(outcomes, dark)};
}

TestState resolve_target(int dim, const std::string& name, const std::optional<std::string>& path) {
  if (path) {
    const json j = json::parse(io::read_text(*path));
    io::check_format_version(j.at("format_version").get<std::string>());
    TestState s = custom_state(name.empty() ? "custom" : name,
                               io::complex_vector_from_json(j.at("amplitudes")));
    if (s.dim() != dim)
      throw DimensionMismatch("target state has dimension " + std::to_string(s.dim()) +
                              ", expected " + std::to_string(dim));
    return s;
  }
  return test_state(name, dim);
}

json mle_to_json(const MleOptions& m) {
  json j{{"max_iters", m.max_iters},
         {"gradient_tolerance", m.gradient_tolerance},
         {"refine_tolerance", m.refine_tolerance},
         {"step_shrink", m.step_shrink}};
  j["initial_step"] = m.initial_step ? json(*m.initial_step) : json(nullptr);
  return j;
}

MleOptions mle_from_json(const json& j) {
  MleOptions m;
  m.max_iters = j.value("max_iters", m.max_iters);
  m.gradient_tolerance = j.value("gradient_tolerance", m.gradient_tolerance);
  m.refine_tolerance = j.value("refine_tolerance", m.refine_tolerance);
  m.step_shrink = j.value("step_shrink", m.step_shrink);
  if (j.contains("initial_step") && !j.at("initial_step").is_null())
    m.initial_step = j.at("initial_step").get<double>();
  return m;
}

json fiducial_source_to_json(const FiducialSource& f, const std::string& state) {
  json j{{"principal_branch", f.principal_branch}};
  if (f.fiducial_path) {
    j["path"] = *f.fiducial_path;
  } else if (f.alpha) {
    j["alpha"] = json{{"magnitude", f.alpha->magnitude}, {"phase", f.alpha->phase}};
  } else {
    j["paired_with"] = state;
    j["principal_branch"] = true;
  }
  return j;
}

FiducialSource fiducial_source_from_json(const json& j) {
  FiducialSource f;
  f.principal_branch = j.value("principal_branch", false);
  if (j.contains("path")) f.fiducial_path = j.at("path").get<std::string>();
  if (j.contains("alpha"))
    f.alpha = AlphaParam::polar(j.at("alpha").at("magnitude").get<double>(),
                                j.at("alpha").at("phase").get<double>());
  return f;
}

void print_value(std::ostream& out, const char* label, double v) {
  out << std::left << std::setw(24) << label << io::format_double(v) << "\n";
}

}  // namespace

double parse_phase(std::string_view text) {
  std::string s(text);
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s.resize(s.size() - 2);
    if (s.empty() || s == "+") return factor;
    if (s == "-") return -factor;
    if (s.back() == '*') s.pop_back();
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw InvalidArgument("cannot parse phase '" + std::string(text) + "'");
  return v * factor;
}

AlphaParam parse_alpha(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos)
    throw InvalidArgument("alpha must be 'magnitude,phase', got '" + std::string(text) + "'");
  const std::string mag(text.substr(0, comma));
  char* end = nullptr;
  const double m = std::strtod(mag.c_str(), &end);
  if (mag.empty() || end != mag.c_str() + mag.size())
    throw InvalidArgument("cannot parse alpha magnitude '" + mag + "'");
  return AlphaParam::polar(m, parse_phase(text.substr(comma + 1)));
}

Fiducial resolve_fiducial(int dim, const FiducialSource& src, const std::string& state) {
  if (src.fiducial_path && src.alpha)
    throw InvalidArgument("give either an alpha or a fiducial file, not both");
  if (src.fiducial_path) {
    Fiducial f = io::load_fiducial(*src.fiducial_path);
    if (f.dim() != dim)
      throw DimensionMismatch("fiducial has dimension " + std::to_string(f.dim()) +
                              " but the data need D = " + std::to_string(dim));
    return f;
  }
  if (src.alpha)
    return src.principal_branch ? principal_branch_fiducial(*src.alpha, dim)
                                : equidistant_fiducial(*src.alpha, dim);
  if (state.empty()) throw InvalidArgument("no fiducial given (use --alpha or --fiducial)");
  return principal_branch_fiducial(paired_alpha(state, dim), dim);
}

void RunConfig::validate() const {
  if (dim < 2) throw InvalidArgument("dim must be at least 2");
  if (rounds < 1) throw InvalidArgument("rounds must be at least 1");
  if (shots() < 1) throw InvalidArgument("shots per round must be positive");
  if (mc_trials < 1) throw InvalidArgument("mc_trials must be at least 1");
  if (!(efficiency > 0.0) || !std::isfinite(efficiency))
    throw InvalidArgument("efficiency must be positive");
  if (!(dark_counts >= 0.0) || !std::isfinite(dark_counts))
    throw InvalidArgument("dark counts must be non-negative");
  mle.validate();
}

json config_to_json(const RunConfig& c) {
  return json{{"dim", c.dim},
              {"fiducial", fiducial_source_to_json(c.fiducial, c.state)},
              {"state", c.state_path ? json{{"path", *c.state_path}} : json{{"name", c.state}}},
              {"rounds", c.rounds},
              {"shots_per_round", c.shots()},
              {"mc_trials", c.mc_trials},
              {"seed", c.seed},
              {"estimator", c.use_mle ? "mle" : "linear"},
              {"mle", mle_to_json(c.mle)},
              {"detector", json{{"efficiency", c.efficiency}, {"dark_counts", c.dark_counts}}},
              {"include_trials", c.include_trials}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.dim = j.value("dim", c.dim);
  if (j.contains("fiducial")) c.fiducial = fiducial_source_from_json(j.at("fiducial"));
  if (j.contains("state")) {
    const json& s = j.at("state");
    if (s.is_string()) {
      c.state = s.get<std::string>();
    } else {
      c.state = s.value("name", c.state);
      if (s.contains("path")) c.state_path = s.at("path").get<std::string>();
    }
  }
  c.rounds = j.value("rounds", c.rounds);
  if (j.contains("shots_per_round")) c.shots_per_round = j.at("shots_per_round").get<std::int64_t>();
  c.mc_trials = j.value("mc_trials", c.mc_trials);
  c.seed = j.value("seed", c.seed);
  if (j.contains("estimator")) c.use_mle = j.at("estimator").get<std::string>() != "linear";
  if (j.contains("mle")) c.mle = mle_from_json(j.at("mle"));
  if (j.contains("detector")) {
    c.efficiency = j.at("detector").value("efficiency", c.efficiency);
    c.dark_counts = j.at("detector").value("dark_counts", c.dark_counts);
  }
  c.include_trials = j.value("include_trials", c.include_trials);
  if (j.contains("report_path")) c.report_path = j.at("report_path").get<std::string>();
  if (j.contains("counts_path")) c.counts_path = j.at("counts_path").get<std::string>();
  c.threads = j.value("threads", c.threads);
  return c;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in config: ") + e.what());
  }
  if (j.contains("format_version")) io::check_format_version(j.at("format_version").get<std::string>());
  return config_from_json(j);
}

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Fiducial f = resolve_fiducial(args.dim, args.fiducial, "");
    const auto effects = build_povm(f);
    const double residual = completeness_residual(effects);
    const double c = condition_number(f.amplitudes(), f.dim());
    out << std::left << std::setw(24) << "dimension" << f.dim() << "\n";
    out << std::left << std::setw(24) << "s_max" << s_max(f.dim()) << "\n";
    out << std::left << std::setw(24) << "effects" << effects.size() << "\n";
    print_value(out, "completeness_residual", residual);
    print_value(out, "condition_number", c);
    if (!(residual < 1e-10)) {
      err << "error: POVM completeness residual " << residual << " exceeds 1e-10\n";
      return int(kNumericalFailure);
    }
    return int(kOk);
  });
}

int cmd_scan(const ScanArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.mag_steps < 1 || args.phase_steps < 1)
      throw InvalidArgument("grid needs at least one step per axis");
    RealVector mags(args.mag_steps);
    for (int i = 0; i < args.mag_steps; ++i)
      mags(i) = args.mag_steps == 1
                    ? args.mag_min
                    : args.mag_min + (args.mag_max - args.mag_min) * i / (args.mag_steps - 1);
    RealVector phases(args.phase_steps);
    for (int i = 0; i < args.phase_steps; ++i)
      phases(i) = args.phase_min + (args.phase_max - args.phase_min) * i / args.phase_steps;
    const ScanGrid grid = scan_grid(args.dim, mags, phases, args.threads);
    io::save_grid(grid, args.dim, args.out_path);

    Eigen::Index bi = 0, bj = 0;
    const double best = grid.log10_cond.minCoeff(&bi, &bj);
    out << "wrote " << grid.log10_cond.size() << " cells to " << args.out_path << "\n";
    out << "minimum log10 cond " << io::format_double(best) << " at |alpha| = "
        << io::format_double(grid.magnitudes(bi)) << ", arg = "
        << io::format_double(grid.phases(bj) / std::numbers::pi) << " pi\n";
    return int(kOk);
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const TestState target = resolve_target(config.dim, config.state, config.state_path);
    const Fiducial fid = resolve_fiducial(config.dim, config.fiducial, config.state);
    const InversionOperator op(fid);
    const auto effects = build_povm(fid);
    const EffectStack stack(effects);
    const DetectorModel det = uniform_detector(stack.size(), config.efficiency, config.dark_counts);

    const ProbMatrix p = forward_probs(target.density(), stack);
    const CountsTable counts = simulate_rounds(p, config.rounds, config.shots(), config.seed, det);

    MonteCarloOptions mc;
    mc.trials = config.mc_trials;
    mc.seed = config.seed;
    mc.threads = config.threads;
    mc.reconstruct.use_mle = config.use_mle;
    mc.reconstruct.mle = config.mle;
    const MonteCarloReport r = monte_carlo_fidelity(counts, target, op, stack, det, mc);

    io::Report report;
    report.config = config_to_json(config);
    report.config["command"] = "simulate";
    report.estimator = config.use_mle ? "mle" : "linear";
    report.condition_number = op.condition_number();
    report.density_matrix = r.point_estimate;
    report.min_eigenvalue = min_eigenvalue(r.point_estimate);
    if (!config.use_mle && report.min_eigenvalue < 0.0)
      report.warnings.push_back("linear estimate is not positive semidefinite");
    const auto failed = std::count(r.converged.begin(), r.converged.end(), false);
    if (failed > 0)
      report.warnings.push_back(std::to_string(failed) + " Monte Carlo trials did not converge");
    report.point_fidelity = r.fidelities.front();
    io::FidelityStats stats{r.mean, r.sigma, r.interval_low, r.interval_high, r.trials, {}, {}};
    if (config.include_trials) {
      stats.trial_fidelities = r.fidelities;
      stats.converged = r.converged;
    }
    report.fidelity = std::move(stats);

    if (config.counts_path) io::save_counts(counts, *config.counts_path);
    io::save_report(report, config.report_path);

    out << "state " << target.name << ", D = " << config.dim << ", cond(G) = "
        << io::format_double(op.condition_number()) << "\n";
    out << "fidelity " << std::setprecision(6) << r.mean << " +- " << 5.0 * r.sigma
        << " (5 sigma, " << r.trials << " trials)\n";
    out << "report written to " << config.report_path << "\n";
    return int(kOk);
  });
}

int cmd_reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CountsTable counts = io::load_counts(args.counts_path);
    const int dim = counts.dim();
    const std::string state_name = args.state.value_or("");
    const Fiducial fid = resolve_fiducial(dim, args.fiducial, state_name);
    const InversionOperator op(fid);
    const auto effects = build_povm(fid);
    const EffectStack stack(effects);
    const DetectorModel det = uniform_detector(stack.size(), args.efficiency, args.dark_counts);

    ReconstructOptions ropts;
    ropts.use_mle = !args.raw;
    ropts.mle = args.mle;
    const Reconstruction rec = reconstruct(counts.averaged(), op, stack, det, ropts);

    io::Report report;
    report.config = json{{"command", "reconstruct"},
                         {"counts", args.counts_path},
                         {"dim", dim},
                         {"fiducial", fiducial_source_to_json(args.fiducial, state_name)},
                         {"estimator", args.raw ? "linear" : "mle"},
                         {"mle", mle_to_json(args.mle)},
                         {"detector", json{{"efficiency", args.efficiency},
                                           {"dark_counts", args.dark_counts}}}};
    report.estimator = args.raw ? "linear" : "mle";
    report.condition_number = op.condition_number();
    report.density_matrix = rec.estimate;
    report.min_eigenvalue = min_eigenvalue(rec.estimate);
    if (args.raw && rec.min_linear_eigenvalue < 0.0) {
      report.warnings.push_back("linear estimate is not positive semidefinite (min eigenvalue " +
                                io::format_double(rec.min_linear_eigenvalue) + ")");
      err << "warning: " << report.warnings.back() << "\n";
    }
    if (!rec.converged) report.warnings.push_back("MLE did not converge");

    if (args.state || args.state_path) {
      const TestState target = resolve_target(dim, state_name, args.state_path);
      report.config["state"] = args.state_path ? json{{"path", *args.state_path}}
                                               : json{{"name", state_name}};
      report.point_fidelity = fidelity(rec.estimate, target.amplitudes);
      out << "fidelity " << io::format_double(*report.point_fidelity) << "\n";
      if (args.mc_trials > 0) {
        MonteCarloOptions mc;
        mc.trials = args.mc_trials;
        mc.seed = args.seed;
        mc.threads = args.threads;
        mc.reconstruct = ropts;
        const MonteCarloReport r = monte_carlo_fidelity(counts, target, op, stack, det, mc);
        report.config["mc_trials"] = args.mc_trials;
        report.config["seed"] = args.seed;
        report.fidelity = io::FidelityStats{r.mean,   r.sigma,      r.interval_low, r.interval_high,
                                            r.trials, r.fidelities, r.converged};
        out << "fidelity " << std::setprecision(6) << r.mean << " +- " << 5.0 * r.sigma
            << " (5 sigma, " << r.trials << " trials)\n";
      }
    }
    io::save_report(report, args.report_path);
    out << "report written to " << args.report_path << "\n";
    return int(kOk);
  });
}

}  // namespace mstomo::cli
