// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#include "mstomo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mstomo/povm.hpp"

namespace mstomo::io {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

long long parse_int(const std::string& text, int line, const char* what) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ParseError(std::string("expected integer ") + what + ", got '" + text + "'", line);
  return v;
}

// '# key=value' header lines, collected in order
struct CsvDocument {
  std::map<std::string, std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // (line number, fields)
};

CsvDocument parse_csv(const std::string& text, const std::vector<std::string>& columns) {
  CsvDocument doc;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool seen_columns = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string body = trim(std::string_view(s).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ParseError("header line without '='", line);
      doc.header[trim(std::string_view(body).substr(0, eq))] =
          trim(std::string_view(body).substr(eq + 1));
      continue;
    }
    auto fields = split(s, ',');
    if (!seen_columns) {
      if (fields != columns) {
        std::string expected;
        for (const auto& c : columns) expected += (expected.empty() ? "" : ",") + c;
        throw ParseError("expected column header '" + expected + "'", line);
      }
      seen_columns = true;
      continue;
    }
    if (fields.size() != columns.size())
      throw ParseError("expected " + std::to_string(columns.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line);
    doc.rows.emplace_back(line, std::move(fields));
  }
  if (!seen_columns) throw ParseError("missing column header");
  auto version = doc.header.find("format_version");
  if (version == doc.header.end()) throw ParseError("missing format_version header");
  check_format_version(version->second);
  return doc;
}

long long header_int(const CsvDocument& doc, const std::string& key) {
  const auto it = doc.header.find(key);
  if (it == doc.header.end()) throw ParseError("missing header '" + key + "'");
  return parse_int(it->second, 0, key.c_str());
}

void dump_into(const json& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          dump_into(v[i], 0, out);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out += inner;
        dump_into(v[i], indent + 1, out);
        out += i + 1 < v.size() ? ",\n" : "\n";
      }
      out += pad + ']';
      return;
    }
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = v.begin(); it != v.end(); ++it, ++i) {
        out += inner + json(it.key()).dump() + ": ";
        dump_into(it.value(), indent + 1, out);
        out += i + 1 < v.size() ? ",\n" : "\n";
      }
      out += pad + '}';
      return;
    }
    default:
      out += v.dump();
      return;
  }
}

json real_matrix_rows(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_rows(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ParseError("expected a non-empty array of rows");
  const std::size_t cols = rows[0].size();
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) throw ParseError("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return m;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) throw InvalidArgument("refusing to serialize NaN");
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isnan(v))
    throw ParseError("expected a number, got '" + text + "'");
  return v;
}

std::string dump_json(const json& value) {
  std::string out;
  dump_into(value, 0, out);
  out += '\n';
  return out;
}

json number_to_json(double x) {
  if (std::isnan(x)) throw InvalidArgument("refusing to serialize NaN");
  if (std::isinf(x)) return format_double(x);
  return x;
}

double number_from_json(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (!j.is_number()) throw ParseError("expected a number");
  return j.get<double>();
}

json complex_matrix_to_json(const ComplexMatrix& m) {
  return json{{"real", real_matrix_rows(m.real())}, {"imag", real_matrix_rows(m.imag())}};
}

ComplexMatrix complex_matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("real") || !j.contains("imag"))
    throw ParseError("complex matrix needs 'real' and 'imag'");
  const RealMatrix re = real_matrix_from_rows(j.at("real"));
  const RealMatrix im = real_matrix_from_rows(j.at("imag"));
  if (re.rows() != im.rows() || re.cols() != im.cols())
    throw ParseError("complex matrix parts differ in shape");
  ComplexMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

json complex_vector_to_json(const ComplexVector& v) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return json{{"real", re}, {"imag", im}};
}

ComplexVector complex_vector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("real") || !j.contains("imag"))
    throw ParseError("complex vector needs 'real' and 'imag'");
  const auto re = j.at("real").get<std::vector<double>>();
  const auto im = j.at("imag").get<std::vector<double>>();
  if (re.size() != im.size()) throw ParseError("complex vector parts differ in length");
  ComplexVector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Eigen::Index>(i)) = {re[i], im[i]};
  return v;
}

void check_format_version(const std::string& version) {
  const auto dot = version.find('.');
  const std::string major = version.substr(0, dot);
  int value = -1;
  const auto [ptr, ec] = std::from_chars(major.data(), major.data() + major.size(), value);
  if (ec != std::errc() || ptr != major.data() + major.size())
    throw ParseError("malformed format_version '" + version + "'");
  if (value != kFormatMajor)
    throw ParseError("unsupported format_version '" + version + "' (expected major " +
                     std::to_string(kFormatMajor) + ")");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// --- counts -----------------------------------------------------------------

std::string format_counts(const CountsTable& table) {
  if (table.rounds().empty())
    throw InvalidArgument("save_counts: table has no integer rounds to write");
  std::string out;
  out += "# format_version=" + std::string(kFormatVersion) + "\n";
  out += "# dim=" + std::to_string(table.dim()) + "\n";
  out += "# s_max=" + std::to_string(table.s_max()) + "\n";
  out += "# rounds=" + std::to_string(table.rounds().size()) + "\n";
  out += "s,j,round,count\n";
  for (std::size_t r = 0; r < table.rounds().size(); ++r) {
    const auto& m = table.rounds()[r];
    for (Eigen::Index s = 0; s < m.rows(); ++s)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out += std::to_string(s) + "," + std::to_string(j) + "," + std::to_string(r) + "," +
               std::to_string(m(s, j)) + "\n";
  }
  return out;
}

CountsTable parse_counts(const std::string& text) {
  const CsvDocument doc = parse_csv(text, {"s", "j", "round", "count"});
  const long long dim = header_int(doc, "dim");
  const long long smax = header_int(doc, "s_max");
  const long long rounds = header_int(doc, "rounds");
  if (dim < 2 || dim > 4096) throw ParseError("dim out of range");
  if (smax != s_max(static_cast<int>(dim)))
    throw ParseError("s_max = " + std::to_string(smax) + " inconsistent with dim = " +
                     std::to_string(dim));
  if (rounds < 1 || rounds > 1000000) throw ParseError("rounds out of range");

  std::vector<CountMatrix> tables(static_cast<std::size_t>(rounds),
                                  CountMatrix::Zero(smax, dim));
  std::vector<char> seen(static_cast<std::size_t>(rounds * smax * dim), 0);
  for (const auto& [line, f] : doc.rows) {
    const long long s = parse_int(f[0], line, "s");
    const long long j = parse_int(f[1], line, "j");
    const long long r = parse_int(f[2], line, "round");
    const long long n = parse_int(f[3], line, "count");
    if (s < 0 || s >= smax)
      throw ParseError("s = " + std::to_string(s) + " outside [0, " + std::to_string(smax) + ")",
                       line);
    if (j < 0 || j >= dim)
      throw ParseError("j = " + std::to_string(j) + " outside [0, " + std::to_string(dim) + ")",
                       line);
    if (r < 0 || r >= rounds)
      throw ParseError("round = " + std::to_string(r) + " outside [0, " +
                           std::to_string(rounds) + ")",
                       line);
    if (n < 0) throw ParseError("negative count", line);
    auto& flag = seen[static_cast<std::size_t>((r * smax + s) * dim + j)];
    if (flag) throw ParseError("duplicate cell (s, j, round)", line);
    flag = 1;
    tables[static_cast<std::size_t>(r)](s, j) = n;
  }
  return CountsTable::from_rounds(std::move(tables));
}

CountsTable load_counts(const std::filesystem::path& path) { return parse_counts(read_text(path)); }

void save_counts(const CountsTable& table, const std::filesystem::path& path) {
  write_text(path, format_counts(table));
}

// --- scan grid --------------------------------------------------------------

std::string format_grid(const ScanGrid& grid, int dim) {
  std::string out;
  out += "# format_version=" + std::string(kFormatVersion) + "\n";
  out += "# dim=" + std::to_string(dim) + "\n";
  out += "abs_alpha,arg_alpha,log10_cond,valid\n";
  for (Eigen::Index i = 0; i < grid.magnitudes.size(); ++i)
    for (Eigen::Index j = 0; j < grid.phases.size(); ++j)
      out += format_double(grid.magnitudes(i)) + "," + format_double(grid.phases(j)) + "," +
             format_double(grid.log10_cond(i, j)) + "," + (grid.valid(i, j) ? "1" : "0") + "\n";
  return out;
}

ScanGrid parse_grid(const std::string& text) {
  const CsvDocument doc = parse_csv(text, {"abs_alpha", "arg_alpha", "log10_cond", "valid"});
  std::vector<double> mags;
  std::vector<double> phases;
  std::vector<double> values;
  std::vector<bool> valid;
  for (const auto& [line, f] : doc.rows) {
    const double m = parse_double(f[0]);
    const double p = parse_double(f[1]);
    if (mags.empty() || mags.back() != m) mags.push_back(m);
    if (mags.size() == 1) phases.push_back(p);
    values.push_back(parse_double(f[2]));
    if (f[3] != "0" && f[3] != "1") throw ParseError("valid must be 0 or 1", line);
    valid.push_back(f[3] == "1");
  }
  if (mags.empty()) throw ParseError("grid has no cells");
  if (values.size() != mags.size() * phases.size())
    throw ParseError("grid rows do not form a full magnitude x phase lattice");
  ScanGrid grid;
  grid.magnitudes = Eigen::Map<const RealVector>(mags.data(), static_cast<Eigen::Index>(mags.size()));
  grid.phases =
      Eigen::Map<const RealVector>(phases.data(), static_cast<Eigen::Index>(phases.size()));
  grid.log10_cond.resize(grid.magnitudes.size(), grid.phases.size());
  grid.valid.resize(grid.magnitudes.size(), grid.phases.size());
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < grid.magnitudes.size(); ++i)
    for (Eigen::Index j = 0; j < grid.phases.size(); ++j, ++idx) {
      const double p = parse_double(doc.rows[idx].second[1]);
      if (p != grid.phases(j))
        throw ParseError("phase axis differs between magnitude rows", doc.rows[idx].first);
      grid.log10_cond(i, j) = values[idx];
      grid.valid(i, j) = valid[idx];
    }
  return grid;
}

void save_grid(const ScanGrid& grid, int dim, const std::filesystem::path& path) {
  write_text(path, format_grid(grid, dim));
}

ScanGrid load_grid(const std::filesystem::path& path) { return parse_grid(read_text(path)); }

// --- fiducial ---------------------------------------------------------------

void save_fiducial(const Fiducial& f, const std::filesystem::path& path) {
  const json j{{"format_version", kFormatVersion},
               {"kind", "fiducial"},
               {"dim", f.dim()},
               {"amplitudes", complex_vector_to_json(f.amplitudes())}};
  write_text(path, dump_json(j));
}

Fiducial load_fiducial(const std::filesystem::path& path) {
  const json j = parse_json_text(read_text(path));
  check_format_version(required<std::string>(j, "format_version"));
  const int dim = required<int>(j, "dim");
  if (!j.contains("amplitudes")) throw ParseError("missing key 'amplitudes'");
  ComplexVector a = complex_vector_from_json(j.at("amplitudes"));
  if (a.size() != dim)
    throw ParseError("fiducial has " + std::to_string(a.size()) + " amplitudes but dim = " +
                     std::to_string(dim));
  return Fiducial(std::move(a));
}

// --- report -----------------------------------------------------------------

json report_to_json(const Report& r) {
  const ComplexMatrix herm = hermitian_part(r.density_matrix);
  json j{{"format_version", kFormatVersion},
         {"kind", "report"},
         {"config", r.config},
         {"estimator", r.estimator},
         {"condition_number", number_to_json(r.condition_number)},
         {"density_matrix", complex_matrix_to_json(herm)},
         {"min_eigenvalue", number_to_json(r.min_eigenvalue)},
         {"warnings", r.warnings}};
  json fid = json::object();
  if (r.point_fidelity) fid["point"] = number_to_json(*r.point_fidelity);
  if (r.fidelity) {
    const auto& s = *r.fidelity;
    fid["mean"] = number_to_json(s.mean);
    fid["sigma"] = number_to_json(s.sigma);
    fid["interval"] = json::array({number_to_json(s.interval_low), number_to_json(s.interval_high)});
    fid["trials"] = s.trials;
    json list = json::array();
    for (double f : s.trial_fidelities) list.push_back(number_to_json(f));
    fid["trial_fidelities"] = std::move(list);
    json conv = json::array();
    for (bool c : s.converged) conv.push_back(c);
    fid["converged"] = std::move(conv);
  }
  j["fidelity"] = std::move(fid);
  return j;
}

Report report_from_json(const json& j) {
  check_format_version(required<std::string>(j, "format_version"));
  Report r;
  r.config = j.value("config", json::object());
  r.estimator = required<std::string>(j, "estimator");
  r.condition_number = number_from_json(j.at("condition_number"));
  r.density_matrix = complex_matrix_from_json(j.at("density_matrix"));
  r.min_eigenvalue = number_from_json(j.at("min_eigenvalue"));
  r.warnings = j.value("warnings", std::vector<std::string>{});
  const json fid = j.value("fidelity", json::object());
  if (fid.contains("point")) r.point_fidelity = number_from_json(fid.at("point"));
  if (fid.contains("mean")) {
    FidelityStats s;
    s.mean = number_from_json(fid.at("mean"));
    s.sigma = number_from_json(fid.at("sigma"));
    s.interval_low = number_from_json(fid.at("interval").at(0));
    s.interval_high = number_from_json(fid.at("interval").at(1));
    s.trials = fid.at("trials").get<std::size_t>();
    for (const auto& f : fid.at("trial_fidelities")) s.trial_fidelities.push_back(number_from_json(f));
    for (const auto& c : fid.at("converged")) s.converged.push_back(c.get<bool>());
    r.fidelity = std::move(s);
  }
  return r;
}

void save_report(const Report& r, const std::filesystem::path& path) {
  write_text(path, dump_json(report_to_json(r)));
}

Report load_report(const std::filesystem::path& path) {
  return report_from_json(parse_json_text(read_text(path)));
}

}  // namespace mstomo::io
