#include "lewsamp/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "lewsamp/errors.hpp"
#include "lewsamp/experiment.hpp"
#include "lewsamp/graph.hpp"
#include "lewsamp/io.hpp"
#include "lewsamp/lewis.hpp"
#include "lewsamp/regression.hpp"
#include "lewsamp/sampler.hpp"
#include "lewsamp/synthetic.hpp"

namespace lewsamp::cli {

namespace {

void emit(const std::string& path, const std::string& content,
          std::ostream& out) {
  if (path.empty())
    out << content;
  else
    write_text_file(path, content);
}

void cmd_lewis_weights(const std::string& matrix_path, double p, double tol,
                       std::size_t max_iter, const std::string& out_path,
                       std::ostream& out, std::ostream& err) {
  const dense_matrix a = read_matrix_market_file(matrix_path);
  const lewis_result lw = lewis_weights(a, p, tol, max_iter);
  std::ostringstream body;
  for (index_t i = 0; i < lw.weights.size(); ++i)
    body << format_double(lw.weights(i)) << "\n";
  emit(out_path, body.str(), out);
  err << "converged in " << lw.iterations << " sweeps, defect "
      << format_double(lw.residual) << ", weight sum "
      << format_double(lw.weights.sum()) << "\n";
}

void cmd_sample(const std::string& matrix_path, double tau_v, double eps,
                std::uint64_t seed, double constant, std::size_t force_n,
                const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const dense_matrix a = read_matrix_market_file(matrix_path);
  const quantile_params tau(tau_v);
  sampled_matrix sm;
  if (force_n > 0) {
    const lewis_result lw = lewis_weights(a, 1.0);
    const sampling_plan planned =
        make_plan(lw, rho_as_phi(tau), bound_b(tau), eps, constant);
    if (force_n < planned.draws)
      err << "warning: forced draw count " << force_n
          << " is below the plan floor " << planned.draws << "\n";
    const sampling_plan plan = make_plan_forced(lw.weights, force_n);
    sm = sample_rows(a, plan, seed);
  } else {
    sm = quantile_sample(a, tau, eps, seed, constant);
  }
  std::ostringstream body;
  write_matrix_market(body, sm.rows);
  emit(out_path, body.str(), out);
  err << "sampled " << sm.rows.rows() << " rows\n";
}

void cmd_fit(const std::string& csv_path, double tau_v, double eps,
             std::uint64_t seed, std::uint64_t budget, std::ostream& out,
             std::ostream& err) {
  const csv_data data = read_csv_file(csv_path);
  if (data.values.cols() < 2)
    throw invalid_spec("fit: csv needs at least two columns (features, response)");
  quantile_problem prob{data.values.leftCols(data.values.cols() - 1),
                        data.values.col(data.values.cols() - 1),
                        quantile_params(tau_v)};
  fit_options opts;
  if (budget > 0) opts.solver_max_steps = budget;
  const solver_report rep = fit(prob, eps, seed, opts);

  nlohmann::ordered_json doc;
  doc["solution"] = std::vector<double>(
      rep.solution.data(), rep.solution.data() + rep.solution.size());
  doc["objective"] = rep.objective;
  doc["sampledRows"] = rep.sampled_rows;
  doc["sgdSteps"] = rep.sgd_steps;
  doc["precondInitialDistance"] = rep.precond_initial_distance;
  doc["seed"] = rep.seed;
  doc["degraded"] = rep.degraded;
  out << doc.dump(2) << "\n";
  err << "fit finished in " << rep.wall_seconds << " s\n";
}

void cmd_sparsify(const std::string& graph_path, double eps, double alpha,
                  bool alpha_given, std::uint64_t seed, double constant,
                  const std::string& out_path, std::ostream& out,
                  std::ostream& err) {
  const weighted_digraph g = read_edge_list_file(graph_path);
  double a = alpha;
  if (!alpha_given) {
    if (g.n > 20)
      throw invalid_spec(
          "sparsify: supply --alpha explicitly for graphs with n > 20");
    a = balance_alpha(g);
    err << "computed balance alpha = " << format_double(a) << "\n";
  }
  const sparsifier_result res = sparsify(g, a, eps, seed, constant);
  std::ostringstream body;
  write_edge_list(body, res.graph);
  emit(out_path, body.str(), out);
  err << "kept " << res.m_prime << " of " << g.edges.size() << " edges ("
      << res.draws << " draws)\n";
}

int cmd_verify_cuts(const std::string& g_path, const std::string& gp_path,
                    double eps, std::ostream& out) {
  const weighted_digraph g = read_edge_list_file(g_path);
  const weighted_digraph gp = read_edge_list_file(gp_path);
  const cut_report rep = verify_cuts(g, gp, eps);

  nlohmann::ordered_json doc;
  doc["maxDeviation"] = rep.max_deviation;
  std::vector<int> cut;
  for (int v = 1; v <= g.n; ++v)
    if ((rep.worst_cut >> (v - 1)) & 1) cut.push_back(v);
  doc["worstCut"] = cut;
  doc["epsilon"] = eps;
  doc["pass"] = rep.pass;
  out << doc.dump(2) << "\n";
  return rep.pass ? 0 : 3;
}

void cmd_gen_synthetic(const synthetic_spec& spec, const std::string& out_path,
                       const std::string& truth_path, std::ostream& out,
                       std::ostream& err) {
  const synthetic_data data = gen_synthetic(spec);
  std::vector<std::string> header;
  for (index_t j = 1; j <= data.a.cols(); ++j)
    header.push_back("c" + std::to_string(j));
  header.push_back("b");
  dense_matrix joined(data.a.rows(), data.a.cols() + 1);
  joined.leftCols(data.a.cols()) = data.a;
  joined.col(data.a.cols()) = data.b;
  std::ostringstream body;
  write_csv(body, header, joined);
  emit(out_path, body.str(), out);
  if (!truth_path.empty()) {
    std::ostringstream truth;
    for (index_t j = 0; j < data.x_star.size(); ++j)
      truth << format_double(data.x_star(j)) << "\n";
    write_text_file(truth_path, truth.str());
  }
  err << "generated " << data.a.rows() << " rows in " << data.a.cols()
      << " blocks\n";
}

void cmd_experiment(const std::string& config_path, const std::string& out_dir,
                    std::ostream& err) {
  std::ifstream cfg_in(config_path);
  if (!cfg_in) throw parse_error(0, "cannot open '" + config_path + "'");
  const experiment_config cfg = parse_experiment_config(cfg_in);

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string rows_path = (fs::path(out_dir) / "rows.csv").string();
  const std::string summary_path =
      (fs::path(out_dir) / "summary.json").string();
  const std::string timing_path =
      (fs::path(out_dir) / "timings.csv").string();

  // Stream rows as they finish so an interrupted run leaves partial data,
  // then rewrite the file in canonical order on success.
  std::ofstream live(rows_path, std::ios::binary);
  if (!live) throw parse_error(0, "cannot open '" + rows_path + "' for writing");
  live << "method,tauH,size,trial,err2,err1,errInf\n";
  const experiment_result res =
      run_experiment(cfg, [&](const experiment_row& row) {
        live << row.method << "," << format_double(row.tau_h) << ","
             << row.size << "," << row.trial << "," << format_double(row.err2)
             << "," << format_double(row.err1) << ","
             << format_double(row.err_inf) << "\n";
        live.flush();
      });
  live.close();

  std::ostringstream rows_body;
  write_experiment_csv(rows_body, res.rows);
  write_text_file(rows_path, rows_body.str());
  write_text_file(summary_path, res.summary_json);
  std::ostringstream timing_body;
  write_experiment_timings(timing_body, res.rows);
  write_text_file(timing_path, timing_body.str());
  err << "wrote " << res.rows.size() << " rows to " << rows_path << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Lewis-weight row sampling for quantile-type losses"};
  app.require_subcommand(1);
  int exit_code = 0;

  // lewis-weights
  auto* lw_cmd = app.add_subcommand(
      "lewis-weights", "Compute l_p Lewis weights of a MatrixMarket matrix");
  std::string lw_matrix, lw_out;
  double lw_p = 1.0, lw_tol = 1e-8;
  std::size_t lw_max_iter = 100;
  lw_cmd->add_option("matrix", lw_matrix, "input .mtx path")->required();
  lw_cmd->add_option("--p", lw_p, "norm exponent in [1, 4)")->required();
  lw_cmd->add_option("--tol", lw_tol, "fixed-point tolerance");
  lw_cmd->add_option("--max-iter", lw_max_iter, "sweep limit");
  lw_cmd->add_option("--out", lw_out, "output path (default stdout)");
  lw_cmd->callback([&] {
    cmd_lewis_weights(lw_matrix, lw_p, lw_tol, lw_max_iter, lw_out, out, err);
  });

  // sample
  auto* sample_cmd = app.add_subcommand(
      "sample", "Row-sample a matrix for a quantile-type loss");
  std::string s_matrix, s_out;
  double s_tau = 0.5, s_eps = 0.5, s_constant = 4.0;
  std::uint64_t s_seed = 1;
  std::size_t s_force_n = 0;
  sample_cmd->add_option("matrix", s_matrix, "input .mtx path")->required();
  sample_cmd->add_option("--tau", s_tau, "loss parameter in (0, 1]")
      ->required();
  sample_cmd->add_option("--eps", s_eps, "accuracy in (0, 1)")->required();
  sample_cmd->add_option("--seed", s_seed, "random seed");
  sample_cmd->add_option("--constant", s_constant, "oversampling constant C");
  sample_cmd->add_option("--force-n", s_force_n,
                         "force the draw count (may violate the plan floor)");
  sample_cmd->add_option("--out", s_out, "output path (default stdout)");
  sample_cmd->callback([&] {
    cmd_sample(s_matrix, s_tau, s_eps, s_seed, s_constant, s_force_n, s_out,
               out, err);
  });

  // fit
  auto* fit_cmd = app.add_subcommand(
      "fit", "Quantile regression on a CSV (last column is the response)");
  std::string f_csv;
  double f_tau = 0.5, f_eps = 0.2;
  std::uint64_t f_seed = 1, f_budget = 0;
  fit_cmd->add_option("csv", f_csv, "input .csv path")->required();
  fit_cmd->add_option("--tau", f_tau, "loss parameter in (0, 1]")->required();
  fit_cmd->add_option("--eps", f_eps, "accuracy in (0, 1)")->required();
  fit_cmd->add_option("--seed", f_seed, "random seed");
  fit_cmd->add_option("--budget", f_budget, "solver step cap (0 = default)");
  fit_cmd->callback(
      [&] { cmd_fit(f_csv, f_tau, f_eps, f_seed, f_budget, out, err); });

  // sparsify
  auto* sp_cmd =
      app.add_subcommand("sparsify", "Cut-sparsify a balanced digraph");
  std::string sp_graph, sp_out;
  double sp_eps = 0.5, sp_alpha = 1.0, sp_constant = 4.0;
  std::uint64_t sp_seed = 1;
  sp_cmd->add_option("graph", sp_graph, "input edge-list path")->required();
  sp_cmd->add_option("--eps", sp_eps, "accuracy in (0, 1)")->required();
  auto* alpha_opt =
      sp_cmd->add_option("--alpha", sp_alpha, "balance bound (computed if omitted)");
  sp_cmd->add_option("--seed", sp_seed, "random seed");
  sp_cmd->add_option("--constant", sp_constant, "oversampling constant C");
  sp_cmd->add_option("--out", sp_out, "output path (default stdout)");
  sp_cmd->callback([&] {
    cmd_sparsify(sp_graph, sp_eps, sp_alpha, alpha_opt->count() > 0, sp_seed,
                 sp_constant, sp_out, out, err);
  });

  // verify-cuts
  auto* vc_cmd = app.add_subcommand(
      "verify-cuts", "Compare all directed cuts of two graphs");
  std::string vc_g, vc_gp;
  double vc_eps = 0.5;
  vc_cmd->add_option("graph", vc_g, "original edge-list path")->required();
  vc_cmd->add_option("sparsifier", vc_gp, "sparsified edge-list path")
      ->required();
  vc_cmd->add_option("--eps", vc_eps, "allowed relative deviation")
      ->required();
  vc_cmd->callback([&] { exit_code = cmd_verify_cuts(vc_g, vc_gp, vc_eps, out); });

  // gen-synthetic
  auto* gen_cmd = app.add_subcommand(
      "gen-synthetic", "Generate the heavy-tailed benchmark instance as CSV");
  synthetic_spec g_spec;
  g_spec.n = 10000;
  g_spec.d = 20;
  g_spec.q = 1.5;
  g_spec.seed = 1;
  std::string gen_out, gen_truth;
  gen_cmd->add_option("--n", g_spec.n, "row count")->required();
  gen_cmd->add_option("--d", g_spec.d, "coordinate count")->required();
  gen_cmd->add_option("--q", g_spec.q, "block growth factor in (1, 2]")
      ->required();
  gen_cmd->add_option("--seed", g_spec.seed, "random seed")->required();
  gen_cmd->add_option("--noise-ratio", g_spec.noise_ratio,
                      "l1 noise-to-signal ratio");
  gen_cmd->add_option("--outlier-prob", g_spec.outlier_prob,
                      "per-row outlier probability");
  gen_cmd->add_option("--outlier-scale", g_spec.outlier_scale,
                      "outlier magnitude multiplier");
  gen_cmd->add_option("--out", gen_out, "output .csv path")->required();
  gen_cmd->add_option("--truth-out", gen_truth,
                      "optional path for the true coefficients");
  gen_cmd->callback(
      [&] { cmd_gen_synthetic(g_spec, gen_out, gen_truth, out, err); });

  // experiment
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Run the sampling comparison harness");
  std::string e_config, e_out;
  exp_cmd->add_option("--config", e_config, "key=value configuration file")
      ->required();
  exp_cmd->add_option("--out", e_out, "output directory")->required();
  exp_cmd->callback([&] { cmd_experiment(e_config, e_out, err); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const parse_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const dimension_mismatch& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const invalid_spec& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const too_large& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const invalid_cut& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lewsamp::cli
