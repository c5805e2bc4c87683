#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lewsamp/lewis.hpp"
#include "lewsamp/types.hpp"

namespace lewsamp {

// Directed edge u -> v with positive weight; vertices are 1-based.
struct digraph_edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

struct weighted_digraph {
  int n = 0;
  std::vector<digraph_edge> edges;
};

// Vertex subset encoded as a bitmask: bit (v - 1) set <=> vertex v in S.
using cut_set = std::uint64_t;

// Throws invalid_spec when endpoints are out of range, loops appear, or a
// weight is not positive and finite.
void validate_digraph(const weighted_digraph& g);

// Signed edge-vertex incidence matrix: one row per edge, +w(e) at the tail
// and -w(e) at the head, in input edge order.
dense_matrix incidence(const weighted_digraph& g);

// Total weight of edges leaving S: w(S, V \ S). S must be a nonempty proper
// subset (invalid_cut otherwise); requires n <= 64 for the mask encoding.
double cut_value(const weighted_digraph& g, cut_set s);

bool strongly_connected(const weighted_digraph& g);

// Balance constant alpha = max over nonempty proper S of
// w(S, V\S) / w(V\S, S), by exhaustive cut enumeration (n <= 20). Throws
// not_strongly_connected when some reverse cut weight vanishes.
double balance_alpha(const weighted_digraph& g);

struct sparsifier_result {
  weighted_digraph graph;
  std::size_t m_prime = 0;   // surviving edge count
  std::size_t draws = 0;     // sample draws N behind the sparsifier
  double epsilon = 0.0;
  double alpha = 0.0;
};

// Cut sparsifier for an alpha-balanced strongly connected digraph: l_1 Lewis
// weights of the incidence matrix, a plan for phi(t) = |t|/2 + t/2 with
// B = alpha + 1, i.i.d. row draws, then duplicate draws of an edge merged
// additively (k draws of edge e give weight k * w(e) / p_e). Surviving edges
// keep input order; every output edge descends from an input edge.
sparsifier_result sparsify(const weighted_digraph& g, double alpha,
                           double epsilon, std::uint64_t seed,
                           double constant = 4.0);

struct cut_report {
  double max_deviation = 0.0;  // max over cuts of |w'(S)/w(S) - 1|
  cut_set worst_cut = 0;
  bool pass = false;           // max_deviation <= epsilon
};

// Exhaustively compares all 2^n - 2 directed cut values of g and gp
// (n <= 20). A cut with w(S) = 0 and w'(S) > 0 reports infinite deviation.
cut_report verify_cuts(const weighted_digraph& g, const weighted_digraph& gp,
                       double epsilon);

// Largest observed ratio ||B x||_1 / (sum_e max((B x)_e, 0)) over `trials`
// standard normal directions plus (for n <= 20) all cut indicators;
// exact-zero B x directions are skipped. Bounded by 1 + alpha on an
// alpha-balanced strongly connected graph.
double check_balance_lemma(const weighted_digraph& g, std::size_t trials,
                           std::uint64_t seed);

}  // namespace lewsamp
