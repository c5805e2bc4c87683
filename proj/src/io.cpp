#include "lewsamp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lewsamp/errors.hpp"

namespace lewsamp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_finite_double(const std::string& tok, std::size_t line_no) {
  if (tok.empty()) throw parse_error(line_no, "empty numeric field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw parse_error(line_no, "not a number: '" + tok + "'");
  }
  if (used != tok.size())
    throw parse_error(line_no, "trailing characters in number: '" + tok + "'");
  if (!std::isfinite(v))
    throw parse_error(line_no, "non-finite value: '" + tok + "'");
  return v;
}

long long parse_integer(const std::string& tok, std::size_t line_no) {
  if (tok.empty()) throw parse_error(line_no, "empty integer field");
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw parse_error(line_no, "not an integer: '" + tok + "'");
  }
  if (used != tok.size())
    throw parse_error(line_no, "trailing characters in integer: '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

dense_matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw parse_error(1, "empty input");
  ++line_no;
  const auto banner = split_ws(lower(trim(line)));
  if (banner.size() < 5 || banner[0] != "%%matrixmarket" ||
      banner[1] != "matrix")
    throw parse_error(line_no, "missing MatrixMarket banner");
  const std::string& format = banner[2];
  if (banner[3] != "real")
    throw parse_error(line_no, "only real matrices are supported");
  if (banner[4] != "general")
    throw parse_error(line_no, "only general symmetry is supported");
  if (format != "array" && format != "coordinate")
    throw parse_error(line_no, "unknown format '" + format + "'");

  // size line (comments in between allowed)
  std::vector<std::string> size_tok;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    size_tok = split_ws(t);
    break;
  }
  if (size_tok.empty()) throw parse_error(line_no, "missing size line");

  if (format == "array") {
    if (size_tok.size() != 2)
      throw parse_error(line_no, "array size line must be 'rows cols'");
    const long long n = parse_integer(size_tok[0], line_no);
    const long long d = parse_integer(size_tok[1], line_no);
    if (n < 1 || d < 1) throw parse_error(line_no, "non-positive dimensions");
    dense_matrix a(n, d);
    // array entries are listed column-major
    long long count = 0;
    const long long total = n * d;
    while (count < total && std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '%') continue;
      for (const auto& tok : split_ws(t)) {
        if (count >= total)
          throw parse_error(line_no, "more entries than rows*cols");
        const double v = parse_finite_double(tok, line_no);
        a(count % n, count / n) = v;
        ++count;
      }
    }
    if (count < total)
      throw parse_error(line_no, "expected " + std::to_string(total) +
                                     " entries, found " +
                                     std::to_string(count));
    return a;
  }

  // coordinate
  if (size_tok.size() != 3)
    throw parse_error(line_no, "coordinate size line must be 'rows cols nnz'");
  const long long n = parse_integer(size_tok[0], line_no);
  const long long d = parse_integer(size_tok[1], line_no);
  const long long nnz = parse_integer(size_tok[2], line_no);
  if (n < 1 || d < 1) throw parse_error(line_no, "non-positive dimensions");
  if (nnz < 0) throw parse_error(line_no, "negative entry count");
  dense_matrix a = dense_matrix::Zero(n, d);
  long long count = 0;
  while (count < nnz && std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    const auto tok = split_ws(t);
    if (tok.size() != 3)
      throw parse_error(line_no, "coordinate entry must be 'i j value'");
    const long long i = parse_integer(tok[0], line_no);
    const long long j = parse_integer(tok[1], line_no);
    if (i < 1 || i > n || j < 1 || j > d)
      throw parse_error(line_no, "index out of range");
    a(i - 1, j - 1) += parse_finite_double(tok[2], line_no);
    ++count;
  }
  if (count < nnz)
    throw parse_error(line_no, "expected " + std::to_string(nnz) +
                                   " entries, found " + std::to_string(count));
  return a;
}

void write_matrix_market(std::ostream& out, const dense_matrix& a) {
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << " " << a.cols() << "\n";
  for (index_t j = 0; j < a.cols(); ++j)
    for (index_t i = 0; i < a.rows(); ++i)
      out << format_double(a(i, j)) << "\n";
}

csv_data read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw parse_error(1, "empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  csv_data out;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.header.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.header.push_back("");
  }
  const std::size_t width = out.header.size();
  if (width == 0) throw parse_error(line_no, "empty header");
  for (const auto& h : out.header)
    if (h.empty()) throw parse_error(line_no, "empty header field");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<double> row;
    row.reserve(width);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      row.push_back(parse_finite_double(trim(cell), line_no));
    if (!line.empty() && line.back() == ',')
      throw parse_error(line_no, "empty trailing field");
    if (row.size() != width)
      throw parse_error(line_no, "expected " + std::to_string(width) +
                                     " fields, found " +
                                     std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error(line_no, "no data rows");

  out.values.resize(static_cast<index_t>(rows.size()),
                    static_cast<index_t>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      out.values(static_cast<index_t>(i), static_cast<index_t>(j)) =
          rows[i][j];
  return out;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const dense_matrix& values) {
  if (static_cast<index_t>(header.size()) != values.cols())
    throw dimension_mismatch("write_csv: header width != column count");
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << header[j];
  out << "\n";
  for (index_t i = 0; i < values.rows(); ++i) {
    for (index_t j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(i, j));
    out << "\n";
  }
}

weighted_digraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  weighted_digraph g;
  long long m = -1;
  long long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tok = split_ws(t);
    if (m < 0) {
      if (tok.size() != 2)
        throw parse_error(line_no, "expected header 'n m'");
      const long long n = parse_integer(tok[0], line_no);
      m = parse_integer(tok[1], line_no);
      if (n < 1) throw parse_error(line_no, "vertex count must be >= 1");
      if (m < 0) throw parse_error(line_no, "negative edge count");
      g.n = static_cast<int>(n);
      continue;
    }
    if (seen >= m) throw parse_error(line_no, "more edges than declared");
    if (tok.size() != 3)
      throw parse_error(line_no, "expected edge 'u v w'");
    digraph_edge ed;
    ed.u = static_cast<int>(parse_integer(tok[0], line_no));
    ed.v = static_cast<int>(parse_integer(tok[1], line_no));
    ed.w = parse_finite_double(tok[2], line_no);
    if (ed.u < 1 || ed.u > g.n || ed.v < 1 || ed.v > g.n)
      throw parse_error(line_no, "endpoint out of range");
    if (ed.u == ed.v) throw parse_error(line_no, "loops are not allowed");
    if (!(ed.w > 0.0)) throw parse_error(line_no, "weight must be positive");
    g.edges.push_back(ed);
    ++seen;
  }
  if (m < 0) throw parse_error(line_no, "missing 'n m' header");
  if (seen != m)
    throw parse_error(line_no, "expected " + std::to_string(m) +
                                   " edges, found " + std::to_string(seen));
  validate_digraph(g);
  return g;
}

void write_edge_list(std::ostream& out, const weighted_digraph& g) {
  out << g.n << " " << g.edges.size() << "\n";
  for (const auto& ed : g.edges)
    out << ed.u << " " << ed.v << " " << format_double(ed.w) << "\n";
}

dense_matrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(0, "cannot open '" + path + "'");
  return read_matrix_market(in);
}

csv_data read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(0, "cannot open '" + path + "'");
  return read_csv(in);
}

weighted_digraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(0, "cannot open '" + path + "'");
  return read_edge_list(in);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error(0, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw parse_error(0, "failed writing '" + path + "'");
}

}  // namespace lewsamp
