// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <limits>

#include "mstomo/io.hpp"
#include "support.hpp"

using namespace mstomo;
using namespace mstomo::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mstomo_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("doubles round trip exactly") {
  for (double x : {0.0, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.1}) CHECK(io::parse_double(io::format_double(x)) == x);
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(io::parse_double("-inf")));
  CHECK_THROWS_AS(io::format_double(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(io::parse_double("1.0x"), ParseError);
}

TEST_CASE("json output is deterministic") {
  nlohmann::json j{{"b", 1}, {"a", {1.5, 2.5}}, {"c", {{"z", true}, {"y", nullptr}}}};
  const std::string s = io::dump_json(j);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("[1.5, 2.5]") != std::string::npos);
  CHECK(io::dump_json(nlohmann::json::parse(s)) == s);
}

TEST_CASE("complex matrices round trip") {
  std::mt19937_64 rng(73);
  const ComplexMatrix m = random_matrix(3, 4, rng);
  CHECK(io::complex_matrix_from_json(io::complex_matrix_to_json(m)) == m);
  const ComplexVector v = random_matrix(5, 1, rng);
  CHECK(io::complex_vector_from_json(io::complex_vector_to_json(v)) == v);
}

TEST_CASE("format version check") {
  CHECK_NOTHROW(io::check_format_version("1.0"));
  CHECK_NOTHROW(io::check_format_version("1.7"));
  CHECK_THROWS_AS(io::check_format_version("2.0"), ParseError);
  CHECK_THROWS_AS(io::check_format_version("one"), ParseError);
}

TEST_CASE("counts file") {
  CountMatrix r0 = CountMatrix::Zero(3, 2), r1 = CountMatrix::Zero(3, 2);
  r0(0, 0) = 5;
  r1(2, 1) = 7;
  const CountsTable t = CountsTable::from_rounds({r0, r1});
  const std::string text = io::format_counts(t);
  CHECK(text.rfind("# format_version=1.0\n", 0) == 0);
  const CountsTable back = io::parse_counts(text);
  CHECK(back.averaged() == t.averaged());
  CHECK(back.rounds().size() == 2);

  const fs::path p = scratch("counts.csv");
  io::save_counts(t, p);
  CHECK(io::read_text(p) == text);
  CHECK(io::load_counts(p).averaged() == t.averaged());

  const std::string header = "# format_version=1.0\n# dim=2\n# s_max=3\n# rounds=1\ns,j,round,count\n";
  SUBCASE("missing cells are zero") {
    CHECK(io::parse_counts(header + "0,1,0,4\n").averaged()(0, 1) == 4.0);
  }
  SUBCASE("errors carry line numbers") {
    try {
      io::parse_counts(header + "0,0,0,1\n5,0,0,1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
    }
    CHECK_THROWS_AS(io::parse_counts(header + "0,0,0,1\n0,0,0,2\n"), ParseError);
    CHECK_THROWS_AS(io::parse_counts(header + "0,0,0,-1\n"), ParseError);
    CHECK_THROWS_AS(io::parse_counts("# dim=2\n"), ParseError);
  }
  CHECK_THROWS_AS(io::load_counts(scratch("does_not_exist.csv")), IoError);
}

TEST_CASE("grid file") {
  ScanGrid g;
  g.magnitudes = RealVector::LinSpaced(2, 0.0, 1.0);
  g.phases = RealVector::LinSpaced(3, 0.0, 2.0);
  g.log10_cond = RealMatrix::Constant(2, 3, 0.5);
  g.log10_cond(0, 0) = std::numeric_limits<double>::infinity();
  g.valid = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(2, 3, true);
  g.valid(1, 2) = false;
  const ScanGrid back = io::parse_grid(io::format_grid(g, 6));
  CHECK(back.magnitudes == g.magnitudes);
  CHECK(back.phases == g.phases);
  CHECK(back.log10_cond == g.log10_cond);
  CHECK(back.valid == g.valid);
  CHECK(io::format_grid(g, 6).find(",inf,") != std::string::npos);
}

TEST_CASE("fiducial file") {
  std::mt19937_64 rng(79);
  const Fiducial f = random_fiducial(5, rng);
  const fs::path p = scratch("fid.json");
  io::save_fiducial(f, p);
  CHECK(io::load_fiducial(p).amplitudes() == f.amplitudes());
  io::write_text(p, R"({"format_version": "1.0", "kind": "fiducial", "dim": 3,
                        "amplitudes": {"real": [1, 0], "imag": [0, 0]}})");
  CHECK_THROWS_AS(io::load_fiducial(p), ParseError);
}

TEST_CASE("report round trip") {
  io::Report r;
  r.config = {{"dim", 2}};
  r.estimator = "mle";
  r.condition_number = 3.25;
  r.density_matrix = ComplexMatrix::Identity(2, 2) / 2.0;
  r.min_eigenvalue = 0.5;
  r.warnings = {"something"};
  r.point_fidelity = 0.75;
  io::FidelityStats s;
  s.mean = 0.7;
  s.sigma = 0.01;
  s.interval_low = 0.65;
  s.interval_high = 0.75;
  s.trials = 2;
  s.trial_fidelities = {0.69, 0.71};
  s.converged = {true, false};
  r.fidelity = s;
  const fs::path p = scratch("report.json");
  io::save_report(r, p);
  const io::Report back = io::load_report(p);
  CHECK(back.config == r.config);
  CHECK(back.condition_number == 3.25);
  CHECK(back.density_matrix == r.density_matrix);
  CHECK(back.warnings == r.warnings);
  CHECK(*back.point_fidelity == 0.75);
  CHECK(back.fidelity->trial_fidelities == s.trial_fidelities);
  CHECK(back.fidelity->converged == s.converged);
  io::save_report(back, scratch("report2.json"));
  CHECK(io::read_text(p) == io::read_text(scratch("report2.json")));
}
