#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lewsamp/graph.hpp"
#include "lewsamp/types.hpp"

namespace lewsamp {

// Matrix Market: reads `array real general` and `coordinate real general`
// (duplicate coordinate entries accumulate); writes the dense array form
// with round-trip (%.17g) precision. Non-finite values are rejected with the
// offending line number.
dense_matrix read_matrix_market(std::istream& in);
void write_matrix_market(std::ostream& out, const dense_matrix& a);

// Comma-separated values with a mandatory header row; every data cell must
// parse as a finite double and all rows must have the header's width.
struct csv_data {
  std::vector<std::string> header;
  dense_matrix values;
};
csv_data read_csv(std::istream& in);
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const dense_matrix& values);

// Edge list: '#' comment lines, then one "n m" line, then m lines "u v w"
// with 1-based endpoints and positive finite weights.
weighted_digraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const weighted_digraph& g);

// File-path conveniences; throw parse_error(0, ...) when a file cannot be
// opened.
dense_matrix read_matrix_market_file(const std::string& path);
csv_data read_csv_file(const std::string& path);
weighted_digraph read_edge_list_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Shortest scientific form with full round-trip precision.
std::string format_double(double x);

}  // namespace lewsamp
