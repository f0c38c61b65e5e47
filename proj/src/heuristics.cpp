#include "maxcut/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "maxcut/energy.hpp"
#include "maxcut/rng.hpp"

namespace maxcut {

namespace {

void check_permutation(const Graph& g, std::span<const Index> order) {
  if (static_cast<Index>(order.size()) != g.num_nodes())
    throw std::invalid_argument("order length does not match node count");
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
  for (Index u : order) {
    if (u < 0 || u >= g.num_nodes() || seen[static_cast<std::size_t>(u)])
      throw std::invalid_argument("order is not a permutation of [0, n)");
    seen[static_cast<std::size_t>(u)] = true;
  }
}

void check_assignment(const Graph& g, const CutAssignment& x) {
  if (x.size() != g.num_nodes())
    throw std::invalid_argument("assignment length does not match node count");
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] > 1)
      throw std::invalid_argument("assignment entry " + std::to_string(i) +
                                  " is not binary");
}

// gain[i]: cut change when flipping node i alone.
std::vector<Scalar> flip_gains(const Graph& g, const CutAssignment& x) {
  std::vector<Scalar> gain(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.edge_weights(i);
    Scalar gi = 0;
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      gi += x[i] == x[nbrs[k]] ? ws[k] : -ws[k];
    gain[static_cast<std::size_t>(i)] = gi;
  }
  return gain;
}

}  // namespace

CutAssignment greedy_construct(const Graph& g, std::span<const Index> order) {
  check_permutation(g, order);
  CutAssignment x = CutAssignment::Zero(g.num_nodes());
  std::vector<bool> assigned(static_cast<std::size_t>(g.num_nodes()), false);
  for (Index u : order) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.edge_weights(u);
    Scalar cut_if_zero = 0;  // weight cut when u joins side 0
    Scalar cut_if_one = 0;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!assigned[static_cast<std::size_t>(nbrs[k])]) continue;
      if (x[nbrs[k]] == 1)
        cut_if_zero += ws[k];
      else
        cut_if_one += ws[k];
    }
    x[u] = cut_if_one > cut_if_zero ? 1 : 0;
    assigned[static_cast<std::size_t>(u)] = true;
  }
  return x;
}

CutAssignment local_search_1flip(const Graph& g, CutAssignment x, Index* flips) {
  check_assignment(g, x);
  const Index n = g.num_nodes();
  Index accepted = 0;

  std::vector<Scalar> gain = flip_gains(g, x);
  while (true) {
    bool any_flip = false;
    while (true) {
      Index best = 0;
      for (Index i = 1; i < n; ++i)
        if (gain[static_cast<std::size_t>(i)] > gain[static_cast<std::size_t>(best)])
          best = i;
      if (!(gain[static_cast<std::size_t>(best)] > 0)) break;

      x[best] ^= 1;
      ++accepted;
      any_flip = true;
      gain[static_cast<std::size_t>(best)] = -gain[static_cast<std::size_t>(best)];
      const auto nbrs = g.neighbors(best);
      const auto ws = g.edge_weights(best);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        // The edge to this neighbor just toggled its cut status.
        if (x[best] != x[nbrs[k]])
          gain[static_cast<std::size_t>(nbrs[k])] -= 2.0 * ws[k];
        else
          gain[static_cast<std::size_t>(nbrs[k])] += 2.0 * ws[k];
      }
    }
    // Recompute from scratch before declaring 1-flip optimality, so
    // incremental rounding error can never end the search early.
    gain = flip_gains(g, x);
    const Scalar top = *std::max_element(gain.begin(), gain.end());
    if (!(top > 0) || !any_flip) break;
  }

  if (flips != nullptr) *flips = accepted;
  return x;
}

CutAssignment extremal_optimization(const Graph& g, const CutAssignment& x0,
                                    const EoConfig& cfg) {
  check_assignment(g, x0);
  if (!(cfg.tau > 1.0)) throw std::invalid_argument("eo tau must exceed 1");
  if (cfg.steps < -1) throw std::invalid_argument("eo steps must be >= 0 (-1 = auto)");
  const Index n = g.num_nodes();
  const Index steps = cfg.steps == -1 ? 200 * n : cfg.steps;

  CutAssignment x = x0;
  std::vector<Scalar> cut_incident(static_cast<std::size_t>(n), 0.0);
  std::vector<Scalar> total_weight(static_cast<std::size_t>(n), 0.0);
  std::vector<Scalar> abs_weight(static_cast<std::size_t>(n), 0.0);
  Scalar cut = 0;
  for (Index i = 0; i < n; ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.edge_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      total_weight[static_cast<std::size_t>(i)] += ws[k];
      abs_weight[static_cast<std::size_t>(i)] += std::abs(ws[k]);
      if (x[i] != x[nbrs[k]]) {
        cut_incident[static_cast<std::size_t>(i)] += ws[k];
        if (nbrs[k] > i) cut += ws[k];
      }
    }
  }

  auto fitness = [&](Index i) {
    const auto s = static_cast<std::size_t>(i);
    return abs_weight[s] > 0 ? cut_incident[s] / abs_weight[s] : 1.0;
  };

  // Cumulative rank weights k^-tau for drawing the flip rank.
  std::vector<Scalar> rank_cdf(static_cast<std::size_t>(n));
  Scalar acc = 0;
  for (Index k = 1; k <= n; ++k) {
    acc += std::pow(static_cast<Scalar>(k), -cfg.tau);
    rank_cdf[static_cast<std::size_t>(k - 1)] = acc;
  }

  auto engine = make_engine(cfg.seed);
  std::uniform_real_distribution<Scalar> unit(0.0, 1.0);

  CutAssignment best = x;
  Scalar best_cut = cut;
  std::vector<Index> by_fitness(static_cast<std::size_t>(n));

  for (Index step = 0; step < steps; ++step) {
    const Scalar r = unit(engine) * acc;
    const auto it = std::lower_bound(rank_cdf.begin(), rank_cdf.end(), r);
    const Index rank = std::min<Index>(
        static_cast<Index>(it - rank_cdf.begin()), n - 1);

    std::iota(by_fitness.begin(), by_fitness.end(), Index{0});
    std::nth_element(by_fitness.begin(), by_fitness.begin() + rank,
                     by_fitness.end(), [&](Index a, Index b) {
                       const Scalar fa = fitness(a);
                       const Scalar fb = fitness(b);
                       return fa < fb || (fa == fb && a < b);
                     });
    const Index u = by_fitness[static_cast<std::size_t>(rank)];

    const auto su = static_cast<std::size_t>(u);
    cut += total_weight[su] - 2.0 * cut_incident[su];
    x[u] ^= 1;
    cut_incident[su] = total_weight[su] - cut_incident[su];
    const auto nbrs = g.neighbors(u);
    const auto ws = g.edge_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const auto sj = static_cast<std::size_t>(nbrs[k]);
      if (x[u] != x[nbrs[k]])
        cut_incident[sj] += ws[k];
      else
        cut_incident[sj] -= ws[k];
    }

    if (cut > best_cut) {
      best_cut = cut;
      best = x;
    }
  }
  return best;
}

}  // namespace maxcut
