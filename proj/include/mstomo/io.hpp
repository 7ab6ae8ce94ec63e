// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk formats. Counts and scan grids are CSV with '#'-prefixed header
// lines; fiducials, run configurations and reports are JSON with sorted keys.
// Floating point values are always written with 17 significant digits
// ("%.17g"), and +infinity as the string "inf". NaN is never written.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mstomo/counts.hpp"
#include "mstomo/fiducial.hpp"

namespace mstomo::io {

/// Major version written to and accepted from every file.
inline constexpr int kFormatMajor = 1;
inline constexpr const char* kFormatVersion = "1.0";

/// "%.17g", or "inf" / "-inf". Throws InvalidArgument on NaN.
std::string format_double(double x);

/// Inverse of format_double.
double parse_double(const std::string& text);

/// Deterministic pretty printer: sorted keys, two-space indent, scalar-only
/// arrays on one line, doubles through format_double.
std::string dump_json(const nlohmann::json& value);

nlohmann::json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j);
nlohmann::json complex_vector_to_json(const ComplexVector& v);
ComplexVector complex_vector_from_json(const nlohmann::json& j);

/// A double that may be +-infinity (stored as a string).
nlohmann::json number_to_json(double x);
double number_from_json(const nlohmann::json& j);

/// Throws ParseError unless `version` has major version kFormatMajor.
void check_format_version(const std::string& version);

CountsTable load_counts(const std::filesystem::path& path);
void save_counts(const CountsTable& table, const std::filesystem::path& path);
CountsTable parse_counts(const std::string& text);
std::string format_counts(const CountsTable& table);

void save_grid(const ScanGrid& grid, int dim, const std::filesystem::path& path);
ScanGrid load_grid(const std::filesystem::path& path);
std::string format_grid(const ScanGrid& grid, int dim);
ScanGrid parse_grid(const std::string& text);

void save_fiducial(const Fiducial& f, const std::filesystem::path& path);
Fiducial load_fiducial(const std::filesystem::path& path);

struct FidelityStats {
  double mean = 0.0;
  double sigma = 0.0;
  double interval_low = 0.0;
  double interval_high = 0.0;
  std::size_t trials = 0;
  std::vector<double> trial_fidelities;
  std::vector<bool> converged;
};

struct Report {
  nlohmann::json config = nlohmann::json::object();
  std::string estimator;  // "mle" or "linear"
  double condition_number = 0.0;
  ComplexMatrix density_matrix;  // Hermitized on save
  double min_eigenvalue = 0.0;
  std::vector<std::string> warnings;
  std::optional<double> point_fidelity;
  std::optional<FidelityStats> fidelity;
};

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);
void save_report(const Report& r, const std::filesystem::path& path);
Report load_report(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mstomo::io
