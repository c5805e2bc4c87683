#include "lewsamp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lewsamp/errors.hpp"
#include "lewsamp/io.hpp"
#include "lewsamp/lewis.hpp"
#include "lewsamp/regression.hpp"
#include "lewsamp/rng.hpp"
#include "lewsamp/sampler.hpp"

namespace lewsamp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const std::string t = trim(tok);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double to_double(const std::string& v, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw parse_error(line_no, "bad numeric value '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw parse_error(line_no, "bad integer value '" + v + "'");
  }
}

}  // namespace

experiment_config parse_experiment_config(std::istream& in) {
  experiment_config cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t a = 0, b = line.size();
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    const std::string t = line.substr(a, b - a);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw parse_error(line_no, "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));

    if (key == "methods") {
      cfg.methods = split_list(val);
      if (cfg.methods.empty())
        throw parse_error(line_no, "methods list is empty");
      for (const auto& m : cfg.methods)
        if (m != "lewis" && m != "uniform")
          throw parse_error(line_no, "unknown method '" + m + "'");
    } else if (key == "tau_h") {
      cfg.tau_h.clear();
      for (const auto& v : split_list(val)) {
        const double th = to_double(v, line_no);
        if (!(th > 0.0 && th < 1.0))
          throw parse_error(line_no, "tau_h values must lie in (0, 1)");
        cfg.tau_h.push_back(th);
      }
      if (cfg.tau_h.empty()) throw parse_error(line_no, "tau_h list is empty");
    } else if (key == "sizes") {
      cfg.sizes.clear();
      for (const auto& v : split_list(val))
        cfg.sizes.push_back(static_cast<std::size_t>(to_u64(v, line_no)));
      if (cfg.sizes.empty()) throw parse_error(line_no, "sizes list is empty");
    } else if (key == "trials") {
      cfg.trials = static_cast<std::size_t>(to_u64(val, line_no));
    } else if (key == "seed") {
      cfg.seed = to_u64(val, line_no);
    } else if (key == "data") {
      if (val == "synthetic") cfg.use_synthetic = true;
      else if (val == "csv") cfg.use_synthetic = false;
      else throw parse_error(line_no, "data must be 'synthetic' or 'csv'");
    } else if (key == "csv") {
      cfg.csv_path = val;
    } else if (key == "n") {
      cfg.synth.n = static_cast<std::size_t>(to_u64(val, line_no));
    } else if (key == "d") {
      cfg.synth.d = static_cast<index_t>(to_u64(val, line_no));
    } else if (key == "q") {
      cfg.synth.q = to_double(val, line_no);
    } else if (key == "noise_ratio") {
      cfg.synth.noise_ratio = to_double(val, line_no);
    } else if (key == "outlier_prob") {
      cfg.synth.outlier_prob = to_double(val, line_no);
    } else if (key == "outlier_scale") {
      cfg.synth.outlier_scale = to_double(val, line_no);
    } else if (key == "solver_steps_per_row") {
      cfg.solver_steps_per_row = to_u64(val, line_no);
    } else if (key == "solver_max_steps") {
      cfg.solver_max_steps = to_u64(val, line_no);
    } else if (key == "reference_plateau") {
      cfg.reference_plateau = to_double(val, line_no);
    } else {
      throw parse_error(line_no, "unknown key '" + key + "'");
    }
  }
  for (const double th : cfg.tau_h)
    if (!(th > 0.0 && th < 1.0))
      throw invalid_spec("experiment: tau_h values must lie in (0, 1)");
  if (cfg.trials == 0) throw invalid_spec("experiment: trials must be >= 1");
  for (const std::size_t s : cfg.sizes)
    if (s == 0) throw invalid_spec("experiment: sizes must be >= 1");
  return cfg;
}

namespace {

double rel_norm(const vec& x, const vec& ref, int p) {
  double num = 0.0, den = 0.0;
  switch (p) {
    case 1:
      num = (x - ref).lpNorm<1>();
      den = ref.lpNorm<1>();
      break;
    case 2:
      num = (x - ref).norm();
      den = ref.norm();
      break;
    default:
      num = (x - ref).lpNorm<Eigen::Infinity>();
      den = ref.lpNorm<Eigen::Infinity>();
      break;
  }
  return num / std::max(den, 1e-300);
}

}  // namespace

experiment_result run_experiment(
    const experiment_config& cfg,
    const std::function<void(const experiment_row&)>& on_row) {
  // Load the instance.
  dense_matrix a;
  vec b;
  if (cfg.use_synthetic) {
    synthetic_spec spec = cfg.synth;
    spec.seed = derive_seed(cfg.seed, 0xda7aULL);
    const synthetic_data data = gen_synthetic(spec);
    a = data.a;
    b = data.b;
  } else {
    if (cfg.csv_path.empty())
      throw invalid_spec("experiment: data=csv requires csv=<path>");
    const csv_data data = read_csv_file(cfg.csv_path);
    if (data.values.cols() < 2)
      throw invalid_spec("experiment: csv needs >= 2 columns");
    a = data.values.leftCols(data.values.cols() - 1);
    b = data.values.col(data.values.cols() - 1);
  }
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const index_t d = a.cols();

  dense_matrix m(a.rows(), d + 1);
  m.leftCols(d) = a;
  m.col(d) = b;

  // Lewis weights of the joined system, shared across trials and sizes.
  bool need_lewis = false;
  for (const auto& method : cfg.methods)
    if (method == "lewis") need_lewis = true;
  lewis_result lw;
  if (need_lewis) lw = lewis_weights(m, 1.0);

  // Full-data reference solution per tau_h at 100x the cell budget.
  std::vector<vec> reference(cfg.tau_h.size());
  for (std::size_t ti = 0; ti < cfg.tau_h.size(); ++ti) {
    const quantile_params tau((1.0 - cfg.tau_h[ti]) / cfg.tau_h[ti]);
    subgradient_options ro;
    ro.steps_per_row = cfg.solver_steps_per_row * 100;
    ro.max_steps = cfg.solver_max_steps * 100;
    ro.plateau_rel = cfg.reference_plateau;
    ro.seed = derive_seed(cfg.seed, 0x4e5eedULL + ti);
    reference[ti] = solve_reduced(a, b, tau, ro).x;
  }

  experiment_result out;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const std::string& method = cfg.methods[mi];
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t stream =
          derive_seed(cfg.seed, 2 + mi * 1000003ULL + trial);
      for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
        const std::size_t size = cfg.sizes[si];

        dense_matrix a_t;
        vec b_t;
        if (size >= n) {
          // Sampling everything degenerates to the full instance.
          a_t = a;
          b_t = b;
        } else {
          const sampling_plan plan = method == "lewis"
                                         ? make_plan_forced(lw.weights, size)
                                         : uniform_plan(n, size);
          const sampled_matrix sm = sample_rows(m, plan, stream);
          a_t = sm.rows.leftCols(d);
          b_t = sm.rows.col(d);
        }

        for (std::size_t ti = 0; ti < cfg.tau_h.size(); ++ti) {
          const quantile_params tau((1.0 - cfg.tau_h[ti]) / cfg.tau_h[ti]);
          subgradient_options so;
          so.steps_per_row = cfg.solver_steps_per_row;
          so.max_steps = cfg.solver_max_steps;
          so.plateau_rel = 1e-9;
          so.seed = derive_seed(stream, 7919ULL * (ti + 1) + size);

          const auto t0 = std::chrono::steady_clock::now();
          const reduced_solution sol = solve_reduced(a_t, b_t, tau, so);
          const double ms =
              std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();

          experiment_row row;
          row.method = method;
          row.tau_h = cfg.tau_h[ti];
          row.size = size;
          row.trial = trial;
          row.err2 = rel_norm(sol.x, reference[ti], 2);
          row.err1 = rel_norm(sol.x, reference[ti], 1);
          row.err_inf = rel_norm(sol.x, reference[ti], 0);
          row.wall_ms = ms;
          if (on_row) on_row(row);
          out.rows.push_back(std::move(row));
        }
      }
    }
  }

  // Canonical primary ordering: (method, tau_h, size, trial), with methods
  // in configuration order.
  std::map<std::string, std::size_t> method_rank;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    method_rank[cfg.methods[mi]] = mi;
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [&](const experiment_row& x, const experiment_row& y) {
                     const auto kx = std::tuple(method_rank.at(x.method),
                                                x.tau_h, x.size, x.trial);
                     const auto ky = std::tuple(method_rank.at(y.method),
                                                y.tau_h, y.size, y.trial);
                     return kx < ky;
                   });

  // Per-cell means and the summary document.
  nlohmann::ordered_json summary;
  nlohmann::ordered_json config;
  config["data"] = cfg.use_synthetic ? "synthetic" : "csv";
  if (cfg.use_synthetic) {
    config["n"] = cfg.synth.n;
    config["d"] = cfg.synth.d;
    config["q"] = cfg.synth.q;
    config["noiseRatio"] = cfg.synth.noise_ratio;
    config["outlierProb"] = cfg.synth.outlier_prob;
    config["outlierScale"] = cfg.synth.outlier_scale;
  } else {
    config["csv"] = cfg.csv_path;
  }
  config["methods"] = cfg.methods;
  config["tauH"] = cfg.tau_h;
  config["sizes"] = cfg.sizes;
  config["trials"] = cfg.trials;
  config["solverStepsPerRow"] = cfg.solver_steps_per_row;
  config["solverMaxSteps"] = cfg.solver_max_steps;
  config["referencePlateau"] = cfg.reference_plateau;
  summary["config"] = config;

  nlohmann::ordered_json cells;
  for (const auto& row : out.rows) {
    std::ostringstream key;
    key << row.method << "/tauH=" << row.tau_h << "/size=" << row.size;
    auto& cell = cells[key.str()];
    if (cell.is_null()) {
      cell["err2"] = 0.0;
      cell["err1"] = 0.0;
      cell["errInf"] = 0.0;
      cell["count"] = 0;
    }
    cell["err2"] = cell["err2"].get<double>() + row.err2;
    cell["err1"] = cell["err1"].get<double>() + row.err1;
    cell["errInf"] = cell["errInf"].get<double>() + row.err_inf;
    cell["count"] = cell["count"].get<std::size_t>() + 1;
  }
  for (auto& [key, cell] : cells.items()) {
    const auto count = cell["count"].get<std::size_t>();
    cell["err2"] = cell["err2"].get<double>() / count;
    cell["err1"] = cell["err1"].get<double>() / count;
    cell["errInf"] = cell["errInf"].get<double>() / count;
  }
  summary["perCellMeans"] = cells;
  summary["seeds"] = {{"master", cfg.seed}};
  summary["versions"] = {{"lewsamp", "0.1.0"}};
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

void write_experiment_csv(std::ostream& out,
                          const std::vector<experiment_row>& rows) {
  out << "method,tauH,size,trial,err2,err1,errInf\n";
  for (const auto& r : rows)
    out << r.method << "," << format_double(r.tau_h) << "," << r.size << ","
        << r.trial << "," << format_double(r.err2) << ","
        << format_double(r.err1) << "," << format_double(r.err_inf) << "\n";
}

void write_experiment_timings(std::ostream& out,
                              const std::vector<experiment_row>& rows) {
  out << "method,tauH,size,trial,wallMs\n";
  for (const auto& r : rows)
    out << r.method << "," << format_double(r.tau_h) << "," << r.size << ","
        << r.trial << "," << format_double(r.wall_ms) << "\n";
}

}  // namespace lewsamp
