// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// Subcommand implementations behind the `mstomo` executable. Each returns a
// process exit code and writes human-readable text to the given streams.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mstomo/fiducial.hpp"
#include "mstomo/mle.hpp"

namespace mstomo::cli {

enum ExitCode : int {
  kOk = 0,
  kNumericalFailure = 1,
  kInvalidInput = 2,
  kIoFailure = 3,
};

/// Phase in radians, or a multiple of pi written with a `pi` suffix ("0.36pi", "pi").
double parse_phase(std::string_view text);

/// "magnitude,phase", e.g. "0.8,0.36pi".
AlphaParam parse_alpha(std::string_view text);

/// Where a fiducial comes from. Exactly one of alpha / fiducial_path is used;
/// with neither, the alpha paired with `state` is taken on the principal branch.
struct FiducialSource {
  std::optional<AlphaParam> alpha;
  bool principal_branch = false;  // allow alpha with negative lambda_k
  std::optional<std::string> fiducial_path;
};

Fiducial resolve_fiducial(int dim, const FiducialSource& src, const std::string& state);

struct RunConfig {
  int dim = 6;
  FiducialSource fiducial;
  std::string state = "psi1";
  std::optional<std::string> state_path;  // explicit amplitudes (fiducial JSON layout)
  int rounds = 10;
  std::optional<std::int64_t> shots_per_round;  // default 10000 * dim
  std::size_t mc_trials = 10000;
  std::uint64_t seed = 1;
  bool use_mle = true;
  MleOptions mle;
  double efficiency = 1.0;
  double dark_counts = 0.0;
  bool include_trials = true;  // write per-trial fidelities into the report
  std::string report_path = "report.json";
  std::optional<std::string> counts_path;
  unsigned threads = 1;

  std::int64_t shots() const { return shots_per_round.value_or(10000LL * dim); }
  void validate() const;
};

/// Everything that determines the numbers in a report. Output paths and the
/// thread count are left out so reports compare equal across those.
nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct CheckArgs {
  int dim = 0;
  FiducialSource fiducial;
};
int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

struct ScanArgs {
  int dim = 6;
  double mag_min = 0.0;
  double mag_max = 1.0;
  int mag_steps = 101;  // inclusive of both ends
  double phase_min = 0.0;
  double phase_max = 6.283185307179586;
  int phase_steps = 160;  // half-open [phase_min, phase_max)
  std::string out_path = "scan.csv";
  unsigned threads = 1;
};
int cmd_scan(const ScanArgs& args, std::ostream& out, std::ostream& err);

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ReconstructArgs {
  std::string counts_path;
  FiducialSource fiducial;
  std::optional<std::string> state;  // target for fidelity, named or via state_path
  std::optional<std::string> state_path;
  bool raw = false;
  MleOptions mle;
  double efficiency = 1.0;
  double dark_counts = 0.0;
  std::size_t mc_trials = 0;
  std::uint64_t seed = 1;
  std::string report_path = "report.json";
  unsigned threads = 1;
};
int cmd_reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mstomo::cli
