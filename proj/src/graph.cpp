#include "maxcut/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <unordered_set>

#include "maxcut/rng.hpp"

namespace maxcut {

Graph Graph::from_edges(Index n, std::span<const Edge> edges) {
  if (n <= 0) throw std::invalid_argument("graph needs a positive node count");

  Graph g;
  g.n_ = n;
  g.m_ = static_cast<Index>(edges.size());
  g.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);

  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("edge endpoint out of range: (" +
                                  std::to_string(e.u) + ", " +
                                  std::to_string(e.v) + ")");
    if (e.u == e.v)
      throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
    ++g.row_offsets_[static_cast<std::size_t>(e.u) + 1];
    ++g.row_offsets_[static_cast<std::size_t>(e.v) + 1];
  }
  std::partial_sum(g.row_offsets_.begin(), g.row_offsets_.end(),
                   g.row_offsets_.begin());

  g.neighbors_.resize(static_cast<std::size_t>(2 * g.m_));
  g.weights_.resize(static_cast<std::size_t>(2 * g.m_));
  std::vector<Index> fill(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (const Edge& e : edges) {
    auto put = [&](Index from, Index to) {
      const auto slot = static_cast<std::size_t>(fill[static_cast<std::size_t>(from)]++);
      g.neighbors_[slot] = to;
      g.weights_[slot] = e.w;
    };
    put(e.u, e.v);
    put(e.v, e.u);
  }

  // Sort each row by neighbor id, keeping weights aligned; duplicates become
  // adjacent and are rejected.
  std::vector<std::pair<Index, Scalar>> row;
  for (Index i = 0; i < n; ++i) {
    const auto b = static_cast<std::size_t>(g.row_offsets_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(g.row_offsets_[static_cast<std::size_t>(i) + 1]);
    row.clear();
    for (std::size_t k = b; k < e; ++k)
      row.emplace_back(g.neighbors_[k], g.weights_[k]);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });
    for (std::size_t k = b; k < e; ++k) {
      if (k > b && row[k - b].first == row[k - b - 1].first)
        throw std::invalid_argument(
            "duplicate edge (" + std::to_string(i) + ", " +
            std::to_string(row[k - b].first) + ")");
      g.neighbors_[k] = row[k - b].first;
      g.weights_[k] = row[k - b].second;
    }
  }
  return g;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(m_));
  for (Index i = 0; i < n_; ++i) {
    const auto nbrs = neighbors(i);
    const auto ws = edge_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (nbrs[k] > i) out.push_back({i, nbrs[k], ws[k]});
  }
  return out;
}

bool Graph::unit_weights() const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [](Scalar w) { return w == 1.0; });
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  s.min_degree = g.degree(0);
  s.max_degree = g.degree(0);
  for (Index i = 1; i < g.num_nodes(); ++i) {
    s.min_degree = std::min(s.min_degree, g.degree(i));
    s.max_degree = std::max(s.max_degree, g.degree(i));
  }
  s.is_regular = s.min_degree == s.max_degree;
  s.regular_degree = s.is_regular ? s.min_degree : 0;
  return s;
}

std::uint64_t graph_hash(const Graph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  eat(static_cast<std::uint64_t>(g.num_nodes()));
  eat(static_cast<std::uint64_t>(g.num_edges()));
  for (Index o : g.row_offsets()) eat(static_cast<std::uint64_t>(o));
  for (Index v : g.neighbor_array()) eat(static_cast<std::uint64_t>(v));
  for (Scalar w : g.weight_array()) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(w));
    std::memcpy(&bits, &w, sizeof(bits));
    eat(bits);
  }
  return h;
}

Graph generate_random_regular(Index n, Index d, RngSeed seed,
                              const RegularGraphOptions& opts) {
  if (d <= 0 || d >= n)
    throw std::invalid_argument("degree must satisfy 0 < d < n");
  if ((n * d) % 2 != 0)
    throw std::invalid_argument("n * d must be even for a d-regular graph");

  const auto stub_count = static_cast<std::size_t>(n * d);
  std::vector<Index> stubs(stub_count);
  for (std::size_t s = 0; s < stub_count; ++s)
    stubs[s] = static_cast<Index>(s) / d;

  auto engine = make_engine(seed);
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  edges.reserve(stub_count / 2);
  seen.reserve(stub_count);

  for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), engine);
    edges.clear();
    seen.clear();
    bool simple = true;
    for (std::size_t s = 0; s < stub_count; s += 2) {
      Index u = stubs[s];
      Index v = stubs[s + 1];
      if (u == v) {
        simple = false;
        break;
      }
      if (u > v) std::swap(u, v);
      const std::uint64_t key =
          (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
      if (!seen.insert(key).second) {
        simple = false;
        break;
      }
      edges.push_back({u, v, 1.0});
    }
    if (simple) return Graph::from_edges(n, edges);
  }
  throw GenerationError("configuration model failed to produce a simple graph in " +
                        std::to_string(opts.max_restarts) + " restarts");
}

}  // namespace maxcut
