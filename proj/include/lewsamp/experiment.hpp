#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lewsamp/synthetic.hpp"
#include "lewsamp/types.hpp"

namespace lewsamp {

// Harness configuration, parsed from flat key=value text (one pair per
// line, '#' comments). Every solve seed is derived from `seed`, so a rerun
// of the same configuration reproduces all primary outputs byte for byte.
struct experiment_config {
  std::vector<std::string> methods{"lewis", "uniform"};
  std::vector<double> tau_h{0.5, 0.75};
  std::vector<std::size_t> sizes{100, 200, 300, 400, 500,
                                 600, 700, 800, 900, 1000};
  std::size_t trials = 50;
  std::uint64_t seed = 1;

  bool use_synthetic = true;
  synthetic_spec synth{10000, 20, 1.5, 1, 0.2, 0.001, 500.0};
  std::string csv_path;  // used when use_synthetic is false

  std::uint64_t solver_steps_per_row = 100;
  std::uint64_t solver_max_steps = 1'000'000;
  double reference_plateau = 1e-6;  // relative-gap stop of the reference run
};

experiment_config parse_experiment_config(std::istream& in);

struct experiment_row {
  std::string method;
  double tau_h = 0.0;
  std::size_t size = 0;
  std::size_t trial = 0;
  double err2 = 0.0;    // ||x - x_ref||_2 / ||x_ref||_2
  double err1 = 0.0;
  double err_inf = 0.0;
  double wall_ms = 0.0;  // diagnostic only; never part of primary outputs
};

struct experiment_result {
  std::vector<experiment_row> rows;  // sorted by (method, tau_h, size, trial)
  std::string summary_json;          // config, per-cell means, seeds, versions
};

// Runs the sampling comparison: per (method, trial) an index stream is
// derived from the master seed (a larger size extends a smaller one's draws;
// methods never share streams), the reduced problem [A~ b~] is solved
// rank-tolerantly per tau_h, and errors are measured against a full-data
// reference run at 100x the cell budget. Sizes >= n use the full data
// unscaled. `on_row` (optional) observes rows in compute order as they
// finish.
experiment_result run_experiment(
    const experiment_config& cfg,
    const std::function<void(const experiment_row&)>& on_row = {});

// Primary rows CSV: method,tauH,size,trial,err2,err1,errInf (no timings, so
// reruns are byte-identical).
void write_experiment_csv(std::ostream& out,
                          const std::vector<experiment_row>& rows);

// Secondary timing sidecar: same keys plus wallMs.
void write_experiment_timings(std::ostream& out,
                              const std::vector<experiment_row>& rows);

}  // namespace lewsamp
