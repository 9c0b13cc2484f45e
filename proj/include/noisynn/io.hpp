#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "noisynn/data_matrix.hpp"
#include "noisynn/error.hpp"
#include "noisynn/noise_model.hpp"

namespace noisynn::io {

/// Shortest decimal string that parses back to exactly `v` (locale independent).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Parses the whole token as a finite-or-infinite double; false on junk.
inline bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  if (token == "inf" || token == "Inf" || token == "infinity") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

inline double parse_double_or_throw(std::string_view token, std::string_view what) {
  double v = 0.0;
  if (!parse_double(token, v)) {
    throw ParseError(std::string(what) + ": not a number '" + std::string(token) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Reads comma-separated rows of reals. Blank lines and lines starting with
/// '#' are skipped.
inline DataMatrix parse_matrix(std::istream& in, const std::string& source = "<input>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> row;
    const auto cells = split(body, ',');
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        throw ParseError(source + ":" + std::to_string(lineno) + ": column " + std::to_string(c + 1) +
                         " is not a finite number '" + std::string(trim(cells[c])) + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": ragged row with " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": empty matrix file");
  return DataMatrix::from_rows(rows);
}

inline DataMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_matrix(in, path);
}

inline std::string format_matrix(const DataMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void save_matrix(const DataMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot write file");
  out << format_matrix(m);
}

/// One real per line.
inline std::vector<double> parse_vector(std::istream& in, const std::string& source = "<input>") {
  std::vector<double> v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    double x = 0.0;
    if (!parse_double(body, x) || !std::isfinite(x)) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": not a finite number '" +
                       std::string(body) + "'");
    }
    v.push_back(x);
  }
  if (v.empty()) throw ParseError(source + ": empty vector file");
  return v;
}

inline std::vector<double> load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_vector(in, path);
}

/// "uniform:0.75", "gaussian:1.0" or "zero".
inline NoiseSpec parse_noise(std::string_view text) {
  text = trim(text);
  if (text == "zero" || text == "none") return NoiseSpec::zero();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("noise spec '" + std::string(text) + "': expected <family>:<param>");
  }
  const auto family = text.substr(0, colon);
  const double param = parse_double_or_throw(text.substr(colon + 1), "noise parameter");
  if (family == "uniform") return NoiseSpec::uniform(param);
  if (family == "gaussian") return NoiseSpec::gaussian(param);
  throw ParseError("noise spec: unknown family '" + std::string(family) + "'");
}

inline std::string format_noise(const NoiseSpec& spec) {
  if (spec.is_zero()) return "zero";
  return spec.family_name() + ":" + format_double(spec.param());
}

/// "100,1000,10000" -> {100, 1000, 10000}
inline std::vector<std::size_t> parse_dims(std::string_view text) {
  std::vector<std::size_t> dims;
  for (auto tok : split(trim(text), ',')) {
    tok = trim(tok);
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v == 0) {
      throw ParseError("dims: not a positive integer '" + std::string(tok) + "'");
    }
    dims.push_back(v);
  }
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) throw ParseError("dims: must be strictly increasing");
  }
  return dims;
}

}  // namespace noisynn::io
