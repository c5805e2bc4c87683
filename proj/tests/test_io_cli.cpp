#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lewsamp/cli.hpp"
#include "lewsamp/errors.hpp"
#include "lewsamp/experiment.hpp"
#include "lewsamp/io.hpp"
#include "lewsamp/linalg.hpp"
#include "lewsamp/regression.hpp"
#include "test_util.hpp"

using namespace lewsamp;
using test::gaussian_matrix;
using test::gaussian_vector;

namespace {

namespace fs = std::filesystem;

// Unique per-test scratch directory under the system temp root.
struct scratch_dir {
  fs::path path;
  explicit scratch_dir(const std::string& tag) {
    path = fs::temp_directory_path() / ("lewsamp_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~scratch_dir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct cli_result {
  int code = 0;
  std::string out;
  std::string err;
};

cli_result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::vector<std::string> argv{"lewsamp"};
  argv.insert(argv.end(), args.begin(), args.end());
  int code = cli::run(argv, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("matrix market array round trip is exact") {
  dense_matrix a = gaussian_matrix(5, 3, 901);
  a(0, 0) = 1e-17;
  a(1, 2) = -3.0e300;
  std::ostringstream out;
  write_matrix_market(out, a);
  std::istringstream in(out.str());
  dense_matrix back = read_matrix_market(in);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 3);
  CHECK((back - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix market coordinate entries accumulate") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "% a comment line\n"
      "2 2 3\n"
      "1 1 2.5\n"
      "2 2 -1.0\n"
      "1 1 0.5\n");
  dense_matrix a = read_matrix_market(in);
  CHECK(a(0, 0) == 3.0);
  CHECK(a(1, 1) == -1.0);
  CHECK(a(0, 1) == 0.0);
}

TEST_CASE("matrix market rejects malformed input with line numbers") {
  SUBCASE("bad banner") {
    std::istringstream in("%%MatrixMarket matrix array complex general\n1 1\n1\n");
    CHECK_THROWS_AS(read_matrix_market(in), parse_error);
  }
  SUBCASE("missing entries") {
    std::istringstream in("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
    CHECK_THROWS_AS(read_matrix_market(in), parse_error);
  }
  SUBCASE("non-finite value carries its line number") {
    std::istringstream in("%%MatrixMarket matrix array real general\n2 1\n1\nnan\n");
    try {
      read_matrix_market(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line == 4);
    }
  }
  SUBCASE("coordinate index out of range") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(in), parse_error);
  }
}

TEST_CASE("csv round trip and validation") {
  dense_matrix a = gaussian_matrix(4, 3, 907);
  std::vector<std::string> header{"c1", "c2", "b"};
  std::ostringstream out;
  write_csv(out, header, a);
  std::istringstream in(out.str());
  csv_data back = read_csv(in);
  CHECK(back.header == header);
  CHECK((back.values - a).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("ragged rows are rejected") {
    std::istringstream bad("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(bad), parse_error);
  }
  SUBCASE("non-numeric cells carry their line") {
    std::istringstream bad("a,b\n1,2\n3,oops\n");
    try {
      read_csv(bad);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line == 3);
    }
  }
  SUBCASE("empty input is rejected") {
    std::istringstream bad("");
    CHECK_THROWS_AS(read_csv(bad), parse_error);
  }
  SUBCASE("crlf line endings are tolerated") {
    std::istringstream crlf("a,b\r\n1,2\r\n");
    csv_data d = read_csv(crlf);
    CHECK(d.header == std::vector<std::string>{"a", "b"});
    CHECK(d.values(0, 1) == 2.0);
  }
}

TEST_CASE("edge list round trip and validation") {
  weighted_digraph g{3, {{1, 2, 1.5}, {2, 3, 2.0}, {3, 1, 0.25}}};
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  weighted_digraph back = read_edge_list(in);
  CHECK(back.n == 3);
  REQUIRE(back.edges.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.edges[i].u == g.edges[i].u);
    CHECK(back.edges[i].v == g.edges[i].v);
    CHECK(back.edges[i].w == g.edges[i].w);
  }

  SUBCASE("comments are skipped") {
    std::istringstream text("# graph\n2 2\n1 2 1.5\n2 1 2.0\n");
    weighted_digraph h = read_edge_list(text);
    CHECK(h.n == 2);
    CHECK(h.edges.size() == 2);
  }
  SUBCASE("loops are rejected") {
    std::istringstream text("2 1\n1 1 1.0\n");
    CHECK_THROWS_AS(read_edge_list(text), parse_error);
  }
  SUBCASE("nonpositive weight is rejected") {
    std::istringstream text("2 1\n1 2 0\n");
    CHECK_THROWS_AS(read_edge_list(text), parse_error);
  }
  SUBCASE("edge count must match the header") {
    std::istringstream text("2 2\n1 2 1.0\n");
    CHECK_THROWS_AS(read_edge_list(text), parse_error);
  }
}

TEST_CASE("doubles are written with round-trip precision") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("cli computes weights matching the library") {
  scratch_dir dir("weights");
  dense_matrix a = gaussian_matrix(12, 3, 911);
  std::ostringstream mm;
  write_matrix_market(mm, a);
  write_text_file(dir.file("a.mtx"), mm.str());

  auto res = run_cli({"lewis-weights", dir.file("a.mtx"), "--p", "2"});
  REQUIRE(res.code == 0);
  vec lev = leverage_scores(a);
  std::istringstream lines(res.out);
  std::string line;
  for (index_t i = 0; i < 12; ++i) {
    REQUIRE(std::getline(lines, line));
    CHECK(std::stod(line) == doctest::Approx(lev(i)).epsilon(1e-8));
  }
}

TEST_CASE("cli exit codes distinguish usage, data and numerical failures") {
  scratch_dir dir("codes");
  CHECK(run_cli({"no-such-command"}).code == 1);
  CHECK(run_cli({"lewis-weights"}).code == 1);  // missing required argument
  CHECK(run_cli({"fit", dir.file("missing.csv"), "--tau", "0.5", "--eps", "0.3"}).code == 2);

  dense_matrix a = gaussian_matrix(30, 3, 913);
  std::ostringstream mm;
  write_matrix_market(mm, a);
  write_text_file(dir.file("a.mtx"), mm.str());
  auto res = run_cli({"lewis-weights", dir.file("a.mtx"), "--p", "1", "--max-iter", "1"});
  CHECK(res.code == 3);

  std::ostringstream garbage;
  garbage << "not a matrix\n";
  write_text_file(dir.file("bad.mtx"), garbage.str());
  CHECK(run_cli({"lewis-weights", dir.file("bad.mtx"), "--p", "1"}).code == 2);
}

TEST_CASE("cli help succeeds") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"fit", "--help"}).code == 0);
}

TEST_CASE("cli sample output is reproducible and honors the draw count") {
  scratch_dir dir("sample");
  dense_matrix a = gaussian_matrix(60, 3, 917);
  std::ostringstream mm;
  write_matrix_market(mm, a);
  write_text_file(dir.file("a.mtx"), mm.str());

  auto r1 = run_cli({"sample", dir.file("a.mtx"), "--tau", "0.5", "--eps", "0.4",
                     "--seed", "3", "--out", dir.file("s1.mtx")});
  REQUIRE(r1.code == 0);
  auto r2 = run_cli({"sample", dir.file("a.mtx"), "--tau", "0.5", "--eps", "0.4",
                     "--seed", "3", "--out", dir.file("s2.mtx")});
  REQUIRE(r2.code == 0);
  CHECK(slurp(dir.file("s1.mtx")) == slurp(dir.file("s2.mtx")));

  auto forced = run_cli({"sample", dir.file("a.mtx"), "--tau", "0.5", "--eps", "0.4",
                         "--seed", "3", "--force-n", "25", "--out", dir.file("s3.mtx")});
  REQUIRE(forced.code == 0);
  std::ifstream in(dir.file("s3.mtx"));
  dense_matrix s = read_matrix_market(in);
  CHECK(s.rows() == 25);
  CHECK(s.cols() == 3);
  // Forcing below the plan floor is allowed but warned about.
  CHECK(forced.err.find("below") != std::string::npos);
}

TEST_CASE("cli fit reports a near-oracle objective as json") {
  scratch_dir dir("fit");
  dense_matrix a = gaussian_matrix(50, 2, 919);
  vec xstar = gaussian_vector(2, 921);
  vec b = a * xstar;
  vec noise = gaussian_vector(50, 923);
  b += 0.2 * noise;
  b(7) += 12.0;

  dense_matrix table(50, 3);
  table.leftCols(2) = a;
  table.col(2) = b;
  std::ostringstream csv;
  write_csv(csv, {"c1", "c2", "b"}, table);
  write_text_file(dir.file("data.csv"), csv.str());

  auto res = run_cli({"fit", dir.file("data.csv"), "--tau", "0.5", "--eps", "0.2",
                      "--seed", "11"});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("\"objective\"") != std::string::npos);
  CHECK(res.out.find("\"solution\"") != std::string::npos);

  // The reported objective should be close to the exhaustive optimum.
  auto oracle = exact_small(quantile_problem{a, b, quantile_params{0.5}});
  auto pos = res.out.find("\"objective\"");
  double reported = std::stod(res.out.substr(res.out.find(':', pos) + 1));
  CHECK(reported <= 1.2 * oracle.second + 1e-9);
  CHECK(reported >= oracle.second * (1.0 - 1e-9));
}

TEST_CASE("cli sparsify then verify-cuts round trip") {
  scratch_dir dir("graph");
  std::ostringstream el;
  // Bidirected 8-cycle with a chord pair.
  weighted_digraph g{8, {}};
  for (int v = 1; v <= 8; ++v) {
    g.edges.push_back({v, v % 8 + 1, 1.0});
    g.edges.push_back({v % 8 + 1, v, 1.0});
  }
  g.edges.push_back({1, 5, 1.0});
  g.edges.push_back({5, 1, 1.0});
  write_edge_list(el, g);
  write_text_file(dir.file("g.txt"), el.str());

  auto sp = run_cli({"sparsify", dir.file("g.txt"), "--eps", "0.5", "--seed", "2",
                     "--out", dir.file("g2.txt")});
  REQUIRE(sp.code == 0);

  auto ok = run_cli({"verify-cuts", dir.file("g.txt"), dir.file("g2.txt"),
                     "--eps", "0.5"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"pass\": true") != std::string::npos);

  auto strict = run_cli({"verify-cuts", dir.file("g.txt"), dir.file("g2.txt"),
                         "--eps", "0.0001"});
  CHECK(strict.code == 3);

  auto rerun = run_cli({"sparsify", dir.file("g.txt"), "--eps", "0.5", "--seed", "2",
                        "--out", dir.file("g3.txt")});
  REQUIRE(rerun.code == 0);
  CHECK(slurp(dir.file("g2.txt")) == slurp(dir.file("g3.txt")));
}

TEST_CASE("cli synthetic generator feeds the fitter") {
  scratch_dir dir("synth");
  auto gen = run_cli({"gen-synthetic", "--n", "80", "--d", "2", "--q", "1.5",
                      "--seed", "5", "--out", dir.file("synth.csv"),
                      "--truth-out", dir.file("truth.txt")});
  REQUIRE(gen.code == 0);

  std::ifstream in(dir.file("synth.csv"));
  csv_data data = read_csv(in);
  CHECK(data.header.size() == 3);  // c1, c2, b
  CHECK(data.values.rows() == 80);

  std::istringstream truth(slurp(dir.file("truth.txt")));
  std::string line;
  int coef = 0;
  while (std::getline(truth, line))
    if (!line.empty()) ++coef;
  CHECK(coef == 2);

  auto fit_res = run_cli({"fit", dir.file("synth.csv"), "--tau", "1.0",
                          "--eps", "0.3", "--seed", "6"});
  CHECK(fit_res.code == 0);
}

TEST_CASE("pinball parameters map onto the loss family") {
  // tau_h in {0.5, 0.75, 0.95}  ->  tau = (1 - tau_h) / tau_h.
  CHECK((1.0 - 0.5) / 0.5 == 1.0);
  CHECK((1.0 - 0.75) / 0.75 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK((1.0 - 0.95) / 0.95 == doctest::Approx(1.0 / 19.0).epsilon(1e-15));
}

TEST_CASE("experiment config parsing") {
  std::istringstream text(
      "# harness configuration\n"
      "methods = lewis, uniform\n"
      "tau_h = 0.5, 0.75\n"
      "sizes = 50, 100\n"
      "trials = 3\n"
      "seed = 9\n"
      "n = 300\n"
      "d = 4\n"
      "q = 1.5\n");
  experiment_config cfg = parse_experiment_config(text);
  CHECK(cfg.methods == std::vector<std::string>{"lewis", "uniform"});
  CHECK(cfg.tau_h == std::vector<double>{0.5, 0.75});
  CHECK(cfg.sizes == std::vector<std::size_t>{50, 100});
  CHECK(cfg.trials == 3);
  CHECK(cfg.seed == 9);
  CHECK(cfg.synth.n == 300);
  CHECK(cfg.synth.d == 4);

  std::istringstream bad("unknown_key = 1\n");
  CHECK_THROWS_AS(parse_experiment_config(bad), parse_error);

  std::istringstream bad_tau("tau_h = 1.5\n");
  CHECK_THROWS_AS(parse_experiment_config(bad_tau), parse_error);
}

TEST_CASE("experiment runs are reproducible and degenerate at full size") {
  experiment_config cfg;
  cfg.methods = {"lewis", "uniform"};
  cfg.tau_h = {0.5};
  cfg.sizes = {60, 120, 200};
  cfg.trials = 3;
  cfg.seed = 4;
  cfg.synth.n = 200;
  cfg.synth.d = 3;
  cfg.synth.q = 1.5;
  cfg.synth.seed = 4;
  cfg.solver_steps_per_row = 100;

  auto r1 = run_experiment(cfg);
  auto r2 = run_experiment(cfg);
  REQUIRE(r1.rows.size() == 2 * 1 * 3 * 3);

  std::ostringstream csv1, csv2;
  write_experiment_csv(csv1, r1.rows);
  write_experiment_csv(csv2, r2.rows);
  CHECK(csv1.str() == csv2.str());
  CHECK(r1.summary_json == r2.summary_json);

  for (const auto& row : r1.rows) {
    CHECK(std::isfinite(row.err2));
    CHECK(row.err2 >= 0.0);
    // size == n solves the full problem, so up to solver tolerance the
    // reference is recovered regardless of method (cell and reference runs
    // use different seeds and budgets, hence not bitwise).
    if (row.size == 200) CHECK(row.err2 <= 1e-3);
  }

  // Rows are sorted by (method order, tau_h, size, trial).
  CHECK(r1.rows.front().method == "lewis");
  CHECK(r1.rows.back().method == "uniform");

  // The timing sidecar carries the same keys plus a wallMs column.
  std::ostringstream timings;
  write_experiment_timings(timings, r1.rows);
  CHECK(timings.str().find("wallMs") != std::string::npos);
}

TEST_CASE("cli experiment writes the output bundle") {
  scratch_dir dir("exper");
  std::ostringstream cfg;
  cfg << "methods = lewis, uniform\n"
      << "tau_h = 0.5\n"
      << "sizes = 40, 80\n"
      << "trials = 2\n"
      << "seed = 3\n"
      << "n = 120\nd = 3\nq = 1.5\n";
  write_text_file(dir.file("cfg.txt"), cfg.str());

  auto res = run_cli({"experiment", "--config", dir.file("cfg.txt"),
                      "--out", dir.file("results")});
  REQUIRE(res.code == 0);
  std::string rows = slurp(dir.file("results/rows.csv"));
  CHECK(rows.rfind("method,tauH,size,trial,err2,err1,errInf", 0) == 0);
  CHECK(slurp(dir.file("results/summary.json")).find("perCellMeans") != std::string::npos);
  CHECK(slurp(dir.file("results/timings.csv")).find("wallMs") != std::string::npos);

  auto rerun = run_cli({"experiment", "--config", dir.file("cfg.txt"),
                        "--out", dir.file("results2")});
  REQUIRE(rerun.code == 0);
  CHECK(slurp(dir.file("results2/rows.csv")) == rows);
  CHECK(slurp(dir.file("results2/summary.json")) ==
        slurp(dir.file("results/summary.json")));
}
