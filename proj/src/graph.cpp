#include "lewsamp/graph.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "lewsamp/errors.hpp"
#include "lewsamp/loss.hpp"
#include "lewsamp/rng.hpp"
#include "lewsamp/sampler.hpp"

namespace lewsamp {

void validate_digraph(const weighted_digraph& g) {
  if (g.n < 1) throw invalid_spec("digraph: need at least one vertex");
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (ed.u < 1 || ed.u > g.n || ed.v < 1 || ed.v > g.n)
      throw invalid_spec("digraph: edge " + std::to_string(e + 1) +
                         " endpoint out of range");
    if (ed.u == ed.v)
      throw invalid_spec("digraph: edge " + std::to_string(e + 1) +
                         " is a loop");
    if (!(ed.w > 0.0) || !std::isfinite(ed.w))
      throw invalid_spec("digraph: edge " + std::to_string(e + 1) +
                         " has nonpositive or non-finite weight");
  }
}

dense_matrix incidence(const weighted_digraph& g) {
  validate_digraph(g);
  dense_matrix b = dense_matrix::Zero(
      static_cast<index_t>(g.edges.size()), g.n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    b(static_cast<index_t>(e), g.edges[e].u - 1) = g.edges[e].w;
    b(static_cast<index_t>(e), g.edges[e].v - 1) = -g.edges[e].w;
  }
  return b;
}

double cut_value(const weighted_digraph& g, cut_set s) {
  validate_digraph(g);
  if (g.n > 64) throw too_large("cut_value: mask encoding needs n <= 64");
  const cut_set full =
      g.n == 64 ? ~cut_set{0} : ((cut_set{1} << g.n) - 1);
  if ((s & ~full) != 0) throw invalid_cut("cut_value: bits beyond vertex count");
  if (s == 0 || s == full)
    throw invalid_cut("cut_value: cut side must be nonempty and proper");
  double total = 0.0;
  for (const auto& ed : g.edges) {
    const bool u_in = (s >> (ed.u - 1)) & 1;
    const bool v_in = (s >> (ed.v - 1)) & 1;
    if (u_in && !v_in) total += ed.w;
  }
  return total;
}

bool strongly_connected(const weighted_digraph& g) {
  validate_digraph(g);
  const int n = g.n;
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (const auto& ed : g.edges) {
    fwd[ed.u - 1].push_back(ed.v - 1);
    rev[ed.v - 1].push_back(ed.u - 1);
  }
  auto reaches_all = [&](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(rev);
}

double balance_alpha(const weighted_digraph& g) {
  validate_digraph(g);
  if (g.n > 20) throw too_large("balance_alpha: exhaustive scan needs n <= 20");
  if (g.n < 2)
    throw invalid_spec("balance_alpha: need at least two vertices");
  if (!strongly_connected(g))
    throw not_strongly_connected("balance_alpha: graph is not strongly connected");

  const cut_set full = (cut_set{1} << g.n) - 1;
  double alpha = 1.0;
  for (cut_set s = 1; s < full; ++s) {
    double fwd = 0.0, bwd = 0.0;
    for (const auto& ed : g.edges) {
      const bool u_in = (s >> (ed.u - 1)) & 1;
      const bool v_in = (s >> (ed.v - 1)) & 1;
      if (u_in && !v_in) fwd += ed.w;
      else if (!u_in && v_in) bwd += ed.w;
    }
    if (!(bwd > 0.0))
      throw not_strongly_connected(
          "balance_alpha: a reverse cut has zero weight");
    alpha = std::max(alpha, fwd / bwd);
  }
  return alpha;
}

sparsifier_result sparsify(const weighted_digraph& g, double alpha,
                           double epsilon, std::uint64_t seed,
                           double constant) {
  validate_digraph(g);
  if (!(alpha >= 1.0))
    throw std::invalid_argument("sparsify: alpha must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("sparsify: epsilon must lie in (0, 1)");
  if (g.edges.empty()) throw invalid_spec("sparsify: graph has no edges");

  const dense_matrix b = incidence(g);
  const lewis_result lw = lewis_weights(b, 1.0);
  const sampling_plan plan =
      make_plan(lw, phi_params(0.5, 0.5), alpha + 1.0, epsilon, constant);
  const std::vector<index_t> draws = draw_indices(plan, seed);

  std::map<index_t, std::size_t> counts;
  for (const index_t e : draws) ++counts[e];

  sparsifier_result out;
  out.graph.n = g.n;
  for (const auto& [e, k] : counts) {
    digraph_edge ed = g.edges[static_cast<std::size_t>(e)];
    ed.w = static_cast<double>(k) * ed.w / plan.p(e);
    out.graph.edges.push_back(ed);
  }
  out.m_prime = out.graph.edges.size();
  out.draws = plan.draws;
  out.epsilon = epsilon;
  out.alpha = alpha;
  return out;
}

cut_report verify_cuts(const weighted_digraph& g, const weighted_digraph& gp,
                       double epsilon) {
  validate_digraph(g);
  validate_digraph(gp);
  if (g.n != gp.n)
    throw dimension_mismatch("verify_cuts: vertex counts differ");
  if (g.n > 20 || g.n < 2)
    throw too_large("verify_cuts: exhaustive scan needs 2 <= n <= 20");

  const cut_set full = (cut_set{1} << g.n) - 1;
  cut_report rep;
  for (cut_set s = 1; s < full; ++s) {
    double orig = 0.0;
    for (const auto& ed : g.edges)
      if (((s >> (ed.u - 1)) & 1) && !((s >> (ed.v - 1)) & 1)) orig += ed.w;
    double sparse = 0.0;
    for (const auto& ed : gp.edges)
      if (((s >> (ed.u - 1)) & 1) && !((s >> (ed.v - 1)) & 1)) sparse += ed.w;

    double dev;
    if (orig == 0.0)
      dev = sparse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
      dev = std::abs(sparse / orig - 1.0);
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_cut = s;
    }
  }
  rep.pass = rep.max_deviation <= epsilon;
  return rep;
}

double check_balance_lemma(const weighted_digraph& g, std::size_t trials,
                           std::uint64_t seed) {
  validate_digraph(g);
  const dense_matrix b = incidence(g);
  const phi_params half(0.5, 0.5);

  double worst = 0.0;
  auto probe = [&](const vec& x) {
    const vec y = b * x;
    const double l1 = y.lpNorm<1>();
    if (l1 <= 0.0) return;
    worst = std::max(worst, l1 / phi_sum(half, y));
  };

  rng gen(seed);
  vec x(g.n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (int i = 0; i < g.n; ++i) x(i) = gen.normal();
    probe(x);
  }
  if (g.n <= 20 && g.n >= 2) {
    const cut_set full = (cut_set{1} << g.n) - 1;
    for (cut_set s = 1; s < full; ++s) {
      for (int i = 0; i < g.n; ++i) x(i) = ((s >> i) & 1) ? 1.0 : 0.0;
      probe(x);
    }
  }
  return worst;
}

}  // namespace lewsamp
