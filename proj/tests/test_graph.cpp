#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "lewsamp/errors.hpp"
#include "lewsamp/graph.hpp"
#include "lewsamp/loss.hpp"
#include "lewsamp/rng.hpp"
#include "test_util.hpp"

using namespace lewsamp;

namespace {

weighted_digraph two_cycle(double w12 = 1.0, double w21 = 1.0) {
  return weighted_digraph{2, {{1, 2, w12}, {2, 1, w21}}};
}

// Bidirected cycle on n vertices, all weights one.
weighted_digraph bidirected_cycle(int n) {
  weighted_digraph g{n, {}};
  for (int v = 1; v <= n; ++v) {
    int next = v % n + 1;
    g.edges.push_back({v, next, 1.0});
    g.edges.push_back({next, v, 1.0});
  }
  return g;
}

// Near-symmetric random graph: a Hamiltonian cycle of vertex pairs plus
// `extra` random pairs, each pair carrying both directions with weights in
// [1, 2]. Any such graph is strongly connected with balance at most 2.
weighted_digraph near_symmetric(int n, int extra, std::uint64_t seed) {
  rng gen(seed);
  weighted_digraph g{n, {}};
  std::set<std::pair<int, int>> used;
  auto add_pair = [&](int u, int v) {
    g.edges.push_back({u, v, 1.0 + gen.uniform()});
    g.edges.push_back({v, u, 1.0 + gen.uniform()});
    used.insert({std::min(u, v), std::max(u, v)});
  };
  for (int v = 1; v <= n; ++v) add_pair(v, v % n + 1);
  while (extra > 0) {
    int u = 1 + static_cast<int>(gen.index(static_cast<std::size_t>(n)));
    int v = 1 + static_cast<int>(gen.index(static_cast<std::size_t>(n)));
    if (u == v) continue;
    if (used.count({std::min(u, v), std::max(u, v)})) continue;
    add_pair(u, v);
    --extra;
  }
  return g;
}

}  // namespace

TEST_CASE("digraph validation") {
  CHECK_NOTHROW(validate_digraph(two_cycle()));
  CHECK_THROWS_AS(validate_digraph(weighted_digraph{2, {{1, 1, 1.0}}}), invalid_spec);
  CHECK_THROWS_AS(validate_digraph(weighted_digraph{2, {{1, 3, 1.0}}}), invalid_spec);
  CHECK_THROWS_AS(validate_digraph(weighted_digraph{2, {{1, 2, 0.0}}}), invalid_spec);
  CHECK_THROWS_AS(validate_digraph(weighted_digraph{2, {{1, 2, -2.0}}}), invalid_spec);
  CHECK_THROWS_AS(validate_digraph(weighted_digraph{0, {}}), invalid_spec);
}

TEST_CASE("incidence rows carry the weight with tail-head signs") {
  weighted_digraph g{3, {{1, 2, 2.5}, {3, 1, 0.5}}};
  dense_matrix b = incidence(g);
  REQUIRE(b.rows() == 2);
  REQUIRE(b.cols() == 3);
  CHECK(b(0, 0) == 2.5);
  CHECK(b(0, 1) == -2.5);
  CHECK(b(0, 2) == 0.0);
  CHECK(b(1, 2) == 0.5);
  CHECK(b(1, 0) == -0.5);
  CHECK(b(1, 1) == 0.0);
}

TEST_CASE("cut values on a path") {
  weighted_digraph g{3, {{1, 2, 1.5}, {2, 3, 2.0}}};
  CHECK(cut_value(g, 0b001) == 1.5);            // S = {1}
  CHECK(cut_value(g, 0b011) == 2.0);            // S = {1,2}
  CHECK(cut_value(g, 0b110) == 0.0);            // S = {2,3}: nothing leaves
  CHECK_THROWS_AS(cut_value(g, 0), invalid_cut);
  CHECK_THROWS_AS(cut_value(g, 0b111), invalid_cut);
  CHECK_THROWS_AS(cut_value(g, 0b1000), invalid_cut);
}

TEST_CASE("cut values agree with the positive part of the incidence image") {
  weighted_digraph g = near_symmetric(6, 4, 61);
  dense_matrix b = incidence(g);
  phi_params half(0.5, 0.5);
  const cut_set full = (cut_set{1} << 6) - 1;
  for (cut_set s = 1; s < full; ++s) {
    vec x(6);
    for (int i = 0; i < 6; ++i) x(i) = ((s >> i) & 1) ? 1.0 : 0.0;
    CHECK(cut_value(g, s) == doctest::Approx(phi_sum(half, b * x)).epsilon(1e-12));
  }
}

TEST_CASE("strong connectivity detection") {
  CHECK(strongly_connected(two_cycle()));
  CHECK(strongly_connected(bidirected_cycle(5)));
  weighted_digraph path{3, {{1, 2, 1.0}, {2, 3, 1.0}}};
  CHECK_FALSE(strongly_connected(path));
  weighted_digraph loop{3, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 1, 1.0}}};
  CHECK(strongly_connected(loop));
}

TEST_CASE("balance constant") {
  CHECK(balance_alpha(two_cycle()) == 1.0);
  CHECK(balance_alpha(two_cycle(2.0, 1.0)) == 2.0);
  CHECK(balance_alpha(bidirected_cycle(6)) == 1.0);
  CHECK_THROWS_AS(balance_alpha(weighted_digraph{2, {{1, 2, 1.0}}}),
                  not_strongly_connected);

  // Superposed directed cycles have weighted in-degree equal to out-degree
  // at every vertex, which forces every cut to be exactly balanced.
  weighted_digraph euler{5, {}};
  for (int v = 1; v <= 5; ++v) euler.edges.push_back({v, v % 5 + 1, 1.0});
  euler.edges.push_back({1, 3, 1.0});
  euler.edges.push_back({3, 5, 1.0});
  euler.edges.push_back({5, 2, 1.0});
  euler.edges.push_back({2, 4, 1.0});
  euler.edges.push_back({4, 1, 1.0});
  CHECK(balance_alpha(euler) == 1.0);

  weighted_digraph random_g = near_symmetric(7, 5, 67);
  double alpha = balance_alpha(random_g);
  CHECK(alpha >= 1.0);
  CHECK(alpha <= 2.0);  // both directions of every pair within a factor 2
}

TEST_CASE("one-norm of the incidence image against its positive part") {
  SUBCASE("asymmetric two-cycle is tight at 1 + alpha") {
    weighted_digraph g = two_cycle(2.0, 1.0);  // alpha = 2
    double worst = check_balance_lemma(g, 200, 5);
    CHECK(worst == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("symmetric two-cycle is tight at 2") {
    double worst = check_balance_lemma(two_cycle(), 200, 5);
    CHECK(worst == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("random balanced graphs respect the bound") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      weighted_digraph g = near_symmetric(8, 6, 100 + s);
      double alpha = balance_alpha(g);
      double worst = check_balance_lemma(g, 2000, 200 + s);
      CHECK(worst <= 1.0 + alpha + 1e-9);
    }
  }
}

TEST_CASE("sparsifier output comes from the input graph") {
  weighted_digraph g = near_symmetric(7, 8, 71);
  auto res = sparsify(g, 2.0, 0.4, 73);
  CHECK(res.alpha == 2.0);
  CHECK(res.epsilon == 0.4);
  CHECK(res.m_prime == res.graph.edges.size());
  CHECK(res.m_prime <= std::min(g.edges.size(), res.draws));
  CHECK(res.graph.n == g.n);

  std::set<std::pair<int, int>> input_pairs;
  for (const auto& e : g.edges) input_pairs.insert({e.u, e.v});
  for (const auto& e : res.graph.edges) {
    CHECK(input_pairs.count({e.u, e.v}) == 1);
    CHECK(e.w > 0.0);
  }

  auto res2 = sparsify(g, 2.0, 0.4, 73);
  REQUIRE(res2.graph.edges.size() == res.graph.edges.size());
  for (std::size_t i = 0; i < res.graph.edges.size(); ++i) {
    CHECK(res.graph.edges[i].u == res2.graph.edges[i].u);
    CHECK(res.graph.edges[i].v == res2.graph.edges[i].v);
    CHECK(res.graph.edges[i].w == res2.graph.edges[i].w);
  }
}

TEST_CASE("sparsifier input validation") {
  weighted_digraph g = two_cycle();
  CHECK_THROWS_AS(sparsify(g, 0.5, 0.4, 1), std::invalid_argument);
  CHECK_THROWS_AS(sparsify(g, 1.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sparsify(g, 1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sparsify(weighted_digraph{3, {}}, 1.0, 0.4, 1), invalid_spec);
}

TEST_CASE("sparsified cycle preserves every cut at the target accuracy") {
  weighted_digraph g = bidirected_cycle(6);
  auto res = sparsify(g, 1.0, 0.5, 79);
  auto rep = verify_cuts(g, res.graph, 0.5);
  CHECK(rep.pass);
  CHECK(rep.max_deviation <= 0.5);
}

TEST_CASE("sparsified random balanced graphs preserve cuts at moderate accuracy") {
  weighted_digraph g = near_symmetric(5, 4, 83);
  double alpha = balance_alpha(g);
  auto res = sparsify(g, alpha, 0.3, 89);
  auto rep = verify_cuts(g, res.graph, 0.3);
  CHECK(rep.pass);
}

TEST_CASE("cut comparison report") {
  weighted_digraph g = near_symmetric(5, 3, 97);

  SUBCASE("identical graphs have zero deviation") {
    auto rep = verify_cuts(g, g, 0.1);
    CHECK(rep.max_deviation == 0.0);
    CHECK(rep.pass);
  }
  SUBCASE("uniform scaling shows up as the exact deviation") {
    weighted_digraph scaled = g;
    for (auto& e : scaled.edges) e.w *= 1.25;
    auto rep = verify_cuts(g, scaled, 0.3);
    CHECK(rep.max_deviation == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.pass);
    auto tight = verify_cuts(g, scaled, 0.2);
    CHECK_FALSE(tight.pass);
  }
  SUBCASE("an over-pruned graph loses whole cuts") {
    weighted_digraph pruned{g.n, {g.edges.front()}};
    auto rep = verify_cuts(g, pruned, 0.5);
    CHECK(rep.max_deviation >= 1.0);  // some positive cut dropped to zero
    CHECK_FALSE(rep.pass);
  }
  SUBCASE("mass on an originally empty cut is an infinite deviation") {
    weighted_digraph one_way{2, {{1, 2, 1.0}}};
    weighted_digraph both_ways{2, {{1, 2, 1.0}, {2, 1, 0.5}}};
    auto rep = verify_cuts(one_way, both_ways, 0.9);
    CHECK(std::isinf(rep.max_deviation));
    CHECK(rep.worst_cut == 0b10);  // S = {2} had no outgoing weight before
    CHECK_FALSE(rep.pass);
  }
  SUBCASE("vertex count mismatch is rejected") {
    weighted_digraph other = near_symmetric(6, 3, 97);
    CHECK_THROWS_AS(verify_cuts(g, other, 0.5), dimension_mismatch);
  }
}

TEST_CASE("plan size reacts to balance and accuracy") {
  weighted_digraph g = near_symmetric(6, 6, 101);
  auto loose = sparsify(g, 1.0, 0.5, 3);
  auto tight = sparsify(g, 1.0, 0.25, 3);
  double eps_ratio =
      static_cast<double>(tight.draws) / static_cast<double>(loose.draws);
  CHECK(eps_ratio >= 3.5);
  CHECK(eps_ratio <= 6.0);

  auto unbalanced = sparsify(g, 2.0, 0.5, 3);  // B = 3 instead of 2
  CHECK(unbalanced.draws > loose.draws);
}
