#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "syncgame/error.hpp"

namespace syncgame {

/// Finite loopless undirected graph on vertices 0..n-1.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Graph() = default;

  explicit Graph(std::size_t n) : n_(n), adjacency_(n) {}

  /// Duplicate edges (in either orientation) collapse; loops throw LoopEdge.
  Graph(std::size_t n, const std::vector<Edge>& edges) : Graph(n) {
    for (const auto& [u, v] : edges) add_edge(u, v);
  }

  void add_edge(std::size_t u, std::size_t v) {
    if (u >= n_ || v >= n_) {
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range: (" + std::to_string(u) +
                                                  "," + std::to_string(v) + ")");
    }
    if (u == v) throw Error(ErrorCode::LoopEdge, "loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
    if (edges_.insert({u, v}).second) {
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
      std::sort(adjacency_[u].begin(), adjacency_[u].end());
      std::sort(adjacency_[v].begin(), adjacency_[v].end());
    }
  }

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Edges as (u, v) with u < v, lexicographically ordered.
  std::vector<Edge> edges() const { return {edges_.begin(), edges_.end()}; }

  bool adjacent(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    return edges_.count({u, v}) > 0;
  }

  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::set<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// ---------------------------------------------------------------------------
// Standard families

inline Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

inline Graph cycle_graph(std::size_t n) {
  Graph g(n);
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "cycle needs at least 3 vertices");
  for (std::size_t v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

inline Graph complete_bipartite_graph(std::size_t a, std::size_t b) {
  Graph g(a + b);
  for (std::size_t u = 0; u < a; ++u)
    for (std::size_t v = 0; v < b; ++v) g.add_edge(u, a + v);
  return g;
}

/// Outer 5-cycle 0..4, inner pentagram 5..9, spokes v -- v+5.
inline Graph petersen_graph() {
  Graph g(10);
  for (std::size_t v = 0; v < 5; ++v) {
    g.add_edge(v, (v + 1) % 5);
    g.add_edge(5 + v, 5 + (v + 2) % 5);
    g.add_edge(v, v + 5);
  }
  return g;
}

// ---------------------------------------------------------------------------
// G [] K_m

/// Vertex (v, i), i in 0..m-1, is flattened to v*m + i. Edges join (v,i) and
/// (w,j) when v == w and i != j, or when v ~ w and i == j.
inline Graph cartesian_product_complete(const Graph& g, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "m must be at least 1");
  Graph out(g.vertex_count() * m);
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) out.add_edge(v * m + i, v * m + j);
  for (const auto& [v, w] : g.edges())
    for (std::size_t i = 0; i < m; ++i) out.add_edge(v * m + i, w * m + i);
  return out;
}

// ---------------------------------------------------------------------------
// DIMACS

/// Reads "c" comments, one "p edge n m" (or "p col n m") header and
/// "e u v" lines with 1-based vertices.
inline Graph parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  Graph g;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    if (tag == "c") continue;
    if (tag == "p") {
      if (have_header) throw Error(ErrorCode::ParseError, "duplicate problem line", line_no);
      std::string format;
      long long n = -1;
      long long m = -1;
      if (!(fields >> format >> n >> m) || (format != "edge" && format != "col") || n < 0 || m < 0) {
        throw Error(ErrorCode::ParseError, "expected 'p edge <n> <m>'", line_no);
      }
      g = Graph(static_cast<std::size_t>(n));
      have_header = true;
      continue;
    }
    if (tag == "e") {
      if (!have_header) throw Error(ErrorCode::ParseError, "edge before problem line", line_no);
      long long u = 0;
      long long v = 0;
      if (!(fields >> u >> v)) throw Error(ErrorCode::ParseError, "expected 'e <u> <v>'", line_no);
      const auto n = static_cast<long long>(g.vertex_count());
      if (u < 1 || v < 1 || u > n || v > n) {
        throw Error(ErrorCode::ParseError, "vertex out of range", line_no);
      }
      if (u == v) throw Error(ErrorCode::LoopEdge, "loop at vertex " + std::to_string(u), line_no);
      g.add_edge(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(v - 1));
      continue;
    }
    throw Error(ErrorCode::ParseError, "unknown line type '" + tag + "'", line_no);
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "missing problem line", line_no);
  return g;
}

/// Canonical form: header, then edges sorted with u < v, 1-based.
inline std::string to_dimacs(const Graph& g) {
  std::ostringstream out;
  out << "p edge " << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << "e " << u + 1 << ' ' << v + 1 << '\n';
  return out.str();
}

}  // namespace syncgame
