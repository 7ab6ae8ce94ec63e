// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mstomo/commands.hpp"

namespace {

using namespace mstomo;
using namespace mstomo::cli;

struct FiducialFlags {
  std::string alpha;
  std::string fiducial_path;
  bool principal = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "equidistant parameter as 'magnitude,phase' (phase may use 'pi', e.g. 0.36pi)");
    cmd->add_option("--fiducial", fiducial_path, "fiducial JSON file");
    cmd->add_flag("--principal-branch", principal,
                  "accept alpha with negative lambda_k (normalized principal-branch amplitudes)");
  }

  FiducialSource resolve() const {
    FiducialSource src;
    if (!alpha.empty()) src.alpha = parse_alpha(alpha);
    if (!fiducial_path.empty()) src.fiducial_path = fiducial_path;
    src.principal_branch = principal;
    return src;
  }
};

void attach_mle(CLI::App* cmd, MleOptions& mle) {
  cmd->add_option("--mle-max-iters", mle.max_iters, "MLE iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--mle-tol", mle.gradient_tolerance, "MLE projected-gradient tolerance, relative to total counts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mle-refine-tol", mle.refine_tolerance, "keep iterating until this relative measure (or no decrease)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qudit state tomography with multiply symmetric states"};
  app.require_subcommand(1);

  // check
  CheckArgs check;
  FiducialFlags check_fid;
  auto* check_cmd = app.add_subcommand("check", "build the POVM and report completeness and cond(G)");
  check_cmd->add_option("--dim", check.dim, "Hilbert space dimension")->required();
  check_fid.attach(check_cmd);

  // scan
  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "condition-number scan over the alpha plane");
  scan_cmd->add_option("--dim", scan.dim, "Hilbert space dimension")->required();
  scan_cmd->add_option("--mag-min", scan.mag_min);
  scan_cmd->add_option("--mag-max", scan.mag_max);
  scan_cmd->add_option("--mag-steps", scan.mag_steps, "magnitude samples, both ends included");
  std::string phase_min = "0", phase_max = "2pi";
  scan_cmd->add_option("--phase-min", phase_min, "first phase (radians or Xpi)");
  scan_cmd->add_option("--phase-max", phase_max, "end of the half-open phase range");
  scan_cmd->add_option("--phase-steps", scan.phase_steps);
  scan_cmd->add_option("-o,--out", scan.out_path, "output CSV");
  scan_cmd->add_option("--threads", scan.threads, "worker threads (0 = all cores)");

  // simulate
  RunConfig sim;
  FiducialFlags sim_fid;
  std::string sim_config;
  std::string sim_state_path, sim_counts_path;
  std::int64_t sim_shots = 0;
  bool sim_raw = false, sim_no_trials = false;
  auto* sim_cmd = app.add_subcommand("simulate", "simulated photon-counting experiment with Monte Carlo errors");
  sim_cmd->add_option("--config", sim_config, "run configuration JSON; flags given explicitly override it");
  auto* o_dim = sim_cmd->add_option("--dim", sim.dim);
  auto* o_state = sim_cmd->add_option("--state", sim.state, "psi1, psi2 or psi3");
  auto* o_state_path = sim_cmd->add_option("--state-file", sim_state_path, "target amplitudes JSON");
  sim_fid.attach(sim_cmd);
  auto* o_rounds = sim_cmd->add_option("--rounds", sim.rounds);
  auto* o_shots = sim_cmd->add_option("--shots", sim_shots, "runs per round (default 10000 x D)");
  auto* o_trials = sim_cmd->add_option("--trials", sim.mc_trials, "Monte Carlo trials");
  auto* o_seed = sim_cmd->add_option("--seed", sim.seed);
  auto* o_raw = sim_cmd->add_flag("--raw", sim_raw, "skip MLE, use the Hermitized linear estimate");
  auto* o_eff = sim_cmd->add_option("--efficiency", sim.efficiency);
  auto* o_dark = sim_cmd->add_option("--dark-counts", sim.dark_counts);
  auto* o_no_trials = sim_cmd->add_flag("--no-trial-list", sim_no_trials, "omit per-trial fidelities");
  auto* o_report = sim_cmd->add_option("-o,--report", sim.report_path);
  auto* o_counts = sim_cmd->add_option("--counts-out", sim_counts_path, "also write the simulated counts CSV");
  auto* o_threads = sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
  MleOptions sim_mle;
  attach_mle(sim_cmd, sim_mle);

  // reconstruct
  ReconstructArgs rec;
  FiducialFlags rec_fid;
  std::string rec_state, rec_state_path;
  auto* rec_cmd = app.add_subcommand("reconstruct", "reconstruct a state from a counts file");
  rec_cmd->add_option("counts", rec.counts_path, "counts CSV")->required();
  rec_fid.attach(rec_cmd);
  rec_cmd->add_option("--state", rec_state, "target state for fidelity (psi1, psi2, psi3)");
  rec_cmd->add_option("--state-file", rec_state_path, "target amplitudes JSON");
  rec_cmd->add_flag("--raw", rec.raw, "report the linear estimate without MLE");
  rec_cmd->add_option("--trials", rec.mc_trials, "Monte Carlo trials (needs a target state)");
  rec_cmd->add_option("--seed", rec.seed);
  rec_cmd->add_option("--efficiency", rec.efficiency);
  rec_cmd->add_option("--dark-counts", rec.dark_counts);
  rec_cmd->add_option("-o,--report", rec.report_path);
  rec_cmd->add_option("--threads", rec.threads, "worker threads (0 = all cores)");
  attach_mle(rec_cmd, rec.mle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidInput;
  }

  try {
    if (check_cmd->parsed()) {
      check.fiducial = check_fid.resolve();
      return cmd_check(check, std::cout, std::cerr);
    }
    if (scan_cmd->parsed()) {
      scan.phase_min = parse_phase(phase_min);
      scan.phase_max = parse_phase(phase_max);
      return cmd_scan(scan, std::cout, std::cerr);
    }
    if (sim_cmd->parsed()) {
      RunConfig cfg = sim_config.empty() ? RunConfig{} : load_config(sim_config);
      if (sim_config.empty() || o_dim->count()) cfg.dim = sim.dim;
      if (sim_config.empty() || o_state->count()) cfg.state = sim.state;
      if (o_state_path->count()) cfg.state_path = sim_state_path;
      if (!sim_fid.alpha.empty() || !sim_fid.fiducial_path.empty()) cfg.fiducial = sim_fid.resolve();
      if (sim_config.empty() || o_rounds->count()) cfg.rounds = sim.rounds;
      if (o_shots->count()) cfg.shots_per_round = sim_shots;
      if (sim_config.empty() || o_trials->count()) cfg.mc_trials = sim.mc_trials;
      if (sim_config.empty() || o_seed->count()) cfg.seed = sim.seed;
      if (o_raw->count()) cfg.use_mle = false;
      if (sim_config.empty() || o_eff->count()) cfg.efficiency = sim.efficiency;
      if (sim_config.empty() || o_dark->count()) cfg.dark_counts = sim.dark_counts;
      if (o_no_trials->count()) cfg.include_trials = false;
      if (sim_config.empty() || o_report->count()) cfg.report_path = sim.report_path;
      if (o_counts->count()) cfg.counts_path = sim_counts_path;
      if (sim_config.empty() || o_threads->count()) cfg.threads = sim.threads;
      if (sim_cmd->count("--mle-max-iters")) cfg.mle.max_iters = sim_mle.max_iters;
      if (sim_cmd->count("--mle-tol")) cfg.mle.gradient_tolerance = sim_mle.gradient_tolerance;
      if (sim_cmd->count("--mle-refine-tol")) cfg.mle.refine_tolerance = sim_mle.refine_tolerance;
      return cmd_simulate(cfg, std::cout, std::cerr);
    }
    if (rec_cmd->parsed()) {
      rec.fiducial = rec_fid.resolve();
      if (!rec_state.empty()) rec.state = rec_state;
      if (!rec_state_path.empty()) rec.state_path = rec_state_path;
      return cmd_reconstruct(rec, std::cout, std::cerr);
    }
  } catch (const mstomo::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const mstomo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}
