#pragma once

#include <span>
#include <vector>

#include "maxcut/graph.hpp"
#include "maxcut/types.hpp"

namespace maxcut {

// Assign nodes in the given order; each node joins the side that cuts the
// most weight against its already-assigned neighbors. Ties (including nodes
// with no assigned neighbor yet) go to side 0.
CutAssignment greedy_construct(const Graph& g, std::span<const Index> order);

// Best-improvement 1-flip local search: repeatedly flip the node with the
// largest positive cut gain (lowest index on ties) until no single flip
// helps. The result is exactly 1-flip-optimal. flips, when given, receives
// the number of accepted flips.
CutAssignment local_search_1flip(const Graph& g, CutAssignment x,
                                 Index* flips = nullptr);

struct EoConfig {
  Scalar tau = 1.4;
  Index steps = -1;  // -1: 200 * n
  RngSeed seed{1};
};

// tau-extremal optimization. Each step ranks nodes ascending by fitness
// (cut weight incident to the node over total absolute incident weight,
// 1 for isolated nodes), draws a rank k with probability proportional to
// k^-tau, flips that node unconditionally, and tracks the best assignment
// ever visited.
CutAssignment extremal_optimization(const Graph& g, const CutAssignment& x0,
                                    const EoConfig& cfg);

}  // namespace maxcut
