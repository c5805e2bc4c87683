#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lewsamp {

// Numerical failures (CLI exit code 3).
struct rank_deficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct singular_gram : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct no_convergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_plan : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct not_strongly_connected : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// All candidate square subsystems of an exact solve were singular.
struct degenerate_instance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data / input contract violations (CLI exit code 2).
struct too_large : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct invalid_cut : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct invalid_spec : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct dimension_mismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
  std::size_t line;
  parse_error(std::size_t line_no, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + reason),
        line(line_no) {}
};

}  // namespace lewsamp
