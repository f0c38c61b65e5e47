#include "maxcut/gset.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unordered_set>
#include <vector>

namespace maxcut {

namespace {

// Whitespace-separated tokens of one line; empty for blank lines.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

long long parse_int(const std::string& tok, int line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  return value;
}

Scalar parse_weight(const std::string& tok, int line) {
  Scalar value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got '" + tok + "'");
  return value;
}

std::string format_number(Scalar w) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, ptr);
}

}  // namespace

Graph parse_gset(std::istream& in) {
  std::string line;
  int line_no = 0;

  // Header: skip leading blank lines, then exactly "n m".
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    header = tokenize(line);
    if (!header.empty()) break;
  }
  if (header.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  if (header.size() != 2)
    throw ParseError(line_no, "header must be 'n m'");
  const long long n = parse_int(header[0], line_no);
  const long long m = parse_int(header[1], line_no);
  if (n <= 0) throw ParseError(line_no, "node count must be positive");
  if (m < 0) throw ParseError(line_no, "edge count must be non-negative");

  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  edges.reserve(static_cast<std::size_t>(m));
  seen.reserve(static_cast<std::size_t>(m));
  while (static_cast<long long>(edges.size()) < m) {
    if (!std::getline(in, line))
      throw ParseError(line_no + 1, "unexpected end of input: expected " +
                                        std::to_string(m) + " edges, got " +
                                        std::to_string(edges.size()));
    ++line_no;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() != 3) throw ParseError(line_no, "edge line must be 'u v w'");
    const long long u = parse_int(toks[0], line_no);
    const long long v = parse_int(toks[1], line_no);
    const Scalar w = parse_weight(toks[2], line_no);
    if (u < 1 || u > n)
      throw ParseError(line_no, "node index " + std::to_string(u) +
                                    " out of range [1, " + std::to_string(n) + "]");
    if (v < 1 || v > n)
      throw ParseError(line_no, "node index " + std::to_string(v) +
                                    " out of range [1, " + std::to_string(n) + "]");
    if (u == v) throw ParseError(line_no, "self-loop at node " + std::to_string(u));
    const std::uint64_t key = u < v
        ? (static_cast<std::uint64_t>(u) << 32 | static_cast<std::uint64_t>(v))
        : (static_cast<std::uint64_t>(v) << 32 | static_cast<std::uint64_t>(u));
    if (!seen.insert(key).second)
      throw ParseError(line_no, "duplicate edge (" + std::to_string(u) + ", " +
                                    std::to_string(v) + ")");
    edges.push_back({static_cast<Index>(u - 1), static_cast<Index>(v - 1), w});
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!tokenize(line).empty())
      throw ParseError(line_no, "trailing content after " + std::to_string(m) +
                                    " edges");
  }

  return Graph::from_edges(static_cast<Index>(n), edges);
}

Graph parse_gset(const std::string& text) {
  std::istringstream in(text);
  return parse_gset(in);
}

Graph read_gset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_gset(in);
}

void serialize_gset(const Graph& g, std::ostream& out) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges())
    out << (e.u + 1) << ' ' << (e.v + 1) << ' ' << format_number(e.w) << '\n';
}

std::string serialize_gset(const Graph& g) {
  std::ostringstream out;
  serialize_gset(g, out);
  return out.str();
}

void write_gset_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  serialize_gset(g, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace maxcut
