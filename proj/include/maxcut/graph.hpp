#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maxcut/types.hpp"

namespace maxcut {

struct Edge {
  Index u = 0;
  Index v = 0;
  Scalar w = 1.0;
};

// Immutable undirected weighted graph in compressed sparse row form.
// Each undirected edge is stored in both directions; rows are sorted by
// neighbor index. Construction validates simplicity (no self-loops, no
// duplicate edges) and index bounds, so a constructed Graph always satisfies
// the CSR invariants.
class Graph {
 public:
  static Graph from_edges(Index n, std::span<const Edge> edges);

  Index num_nodes() const { return n_; }
  Index num_edges() const { return m_; }

  Index degree(Index i) const {
    return row_offsets_[static_cast<std::size_t>(i) + 1] -
           row_offsets_[static_cast<std::size_t>(i)];
  }

  std::span<const Index> neighbors(Index i) const {
    const auto b = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i) + 1]);
    return {neighbors_.data() + b, e - b};
  }

  std::span<const Scalar> edge_weights(Index i) const {
    const auto b = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i) + 1]);
    return {weights_.data() + b, e - b};
  }

  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> neighbor_array() const { return neighbors_; }
  std::span<const Scalar> weight_array() const { return weights_; }

  // Unique edges as (u, v, w) with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  bool unit_weights() const;

 private:
  Graph() = default;

  Index n_ = 0;
  Index m_ = 0;
  std::vector<Index> row_offsets_;
  std::vector<Index> neighbors_;
  std::vector<Scalar> weights_;
};

struct DegreeStats {
  Index min_degree = 0;
  Index max_degree = 0;
  bool is_regular = false;
  Index regular_degree = 0;  // valid only when is_regular
};

DegreeStats degree_stats(const Graph& g);

// FNV-1a over the CSR arrays; identifies an instance across sweep rows.
std::uint64_t graph_hash(const Graph& g);

struct RegularGraphOptions {
  int max_restarts = 10000;
};

// Uniform-ish random d-regular simple graph via the configuration (pairing)
// model: pair up n*d stubs and restart from scratch whenever the pairing
// produces a self-loop or a duplicate edge. All weights are 1.
Graph generate_random_regular(Index n, Index d, RngSeed seed,
                              const RegularGraphOptions& opts = {});

}  // namespace maxcut
