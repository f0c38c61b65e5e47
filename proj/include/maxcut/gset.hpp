#pragma once

#include <iosfwd>
#include <string>

#include "maxcut/graph.hpp"

namespace maxcut {

// Gset text format: a header line "n m" followed by m lines "u v w" with
// 1-based node indices and integer or real weights. Parse errors carry the
// offending line number.
Graph parse_gset(std::istream& in);
Graph parse_gset(const std::string& text);
Graph read_gset_file(const std::string& path);

// Mirror of parse_gset: one edge per line with u < v, rows sorted, weights
// printed in shortest round-trip form, so serialize-then-parse is exact.
void serialize_gset(const Graph& g, std::ostream& out);
std::string serialize_gset(const Graph& g);
void write_gset_file(const Graph& g, const std::string& path);

}  // namespace maxcut
