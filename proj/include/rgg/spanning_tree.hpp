#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/graph.hpp"

namespace rgg {

/// (2 ceil(d^{1/p}) + 1)^d + 1; equals 26 in the Euclidean plane.
inline std::size_t tree_degree_bound(const NormSpec& norm) {
  const auto c = static_cast<std::size_t>(std::ceil(norm.diameter_factor() - 1e-12));
  std::size_t b = 1;
  for (int j = 0; j < norm.d(); ++j) b *= 2 * c + 1;
  return b + 1;
}

struct SpanningTreePlan {
  std::size_t n = 0;
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<std::vector<VertexId>> adj;  // sorted

  std::size_t degree(VertexId v) const { return adj[v].size(); }
  std::size_t max_degree() const {
    std::size_t m = 0;
    for (const auto& a : adj) m = std::max(m, a.size());
    return m;
  }
};

namespace detail {

inline SpanningTreePlan tree_from_edges(std::size_t n, std::vector<std::pair<VertexId, VertexId>> edges) {
  SpanningTreePlan t;
  t.n = n;
  t.adj.resize(n);
  for (auto [u, v] : edges) {
    t.adj[u].push_back(v);
    t.adj[v].push_back(u);
  }
  for (auto& a : t.adj) std::sort(a.begin(), a.end());
  t.edges = std::move(edges);
  return t;
}

}  // namespace detail

/// Spanning tree of bounded degree for a connected geometric graph `g` at
/// threshold r whose vertex positions are `coords`. Vertices are bucketed
/// into cubes of side r / d^{1/p}; each cube contributes a path through its
/// vertices, each pair of cubes joined by an edge of g contributes one such
/// edge, and Kruskal over that subgraph removes the remaining cycles.
inline SpanningTreePlan bounded_degree_spanning_tree(const GeometricGraph& g, const PointSet& coords,
                                                     const NormSpec& norm, double r) {
  const std::size_t n = g.n();
  require(coords.size() == n, "bounded_degree_spanning_tree: one position per vertex required");
  require(r > 0.0, "bounded_degree_spanning_tree: r must be positive");
  if (n == 0) return {};
  require(is_connected(g), "bounded_degree_spanning_tree: input graph is disconnected");

  const GridIndex cells(coords, r / norm.diameter_factor());
  std::vector<std::uint32_t> bucket_of(n);
  std::vector<std::pair<VertexId, VertexId>> candidates;
  for (std::size_t b = 0; b < cells.bucket_count(); ++b) {
    const auto members = cells.bucket_members(b);
    for (std::size_t k = 0; k < members.size(); ++k) {
      bucket_of[members[k]] = static_cast<std::uint32_t>(b);
      if (k > 0 && g.adjacent(members[k - 1], members[k])) candidates.emplace_back(members[k - 1], members[k]);
    }
  }
  // One representative edge, the smallest (u, v), per pair of distinct cubes.
  std::unordered_map<std::uint64_t, std::pair<VertexId, VertexId>> link;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v : g.neighbors(u)) {
      if (v <= u || bucket_of[u] == bucket_of[v]) continue;
      const auto a = std::min(bucket_of[u], bucket_of[v]), b = std::max(bucket_of[u], bucket_of[v]);
      link.try_emplace(std::uint64_t{a} << 32 | b, u, v);
    }
  std::vector<std::pair<std::uint64_t, std::pair<VertexId, VertexId>>> ordered(link.begin(), link.end());
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [key, e] : ordered) candidates.push_back(e);

  UnionFind uf(n);
  std::vector<std::pair<VertexId, VertexId>> chosen;
  for (auto [u, v] : candidates)
    if (uf.unite(u, v)) chosen.emplace_back(u, v);
  if (uf.sets() != 1) {
    // Only reachable through rounding at cube boundaries; fall back to all edges.
    for (VertexId u = 0; u < n && uf.sets() > 1; ++u)
      for (VertexId v : g.neighbors(u))
        if (uf.unite(u, v)) chosen.emplace_back(u, v);
  }
  return detail::tree_from_edges(n, std::move(chosen));
}

/// Convenience overload: the geometric graph of `coords` at threshold r.
inline SpanningTreePlan bounded_degree_spanning_tree(const PointSet& coords, const NormSpec& norm, double r) {
  return bounded_degree_spanning_tree(graph_at_radius(coords, norm, r), coords, norm, r);
}

inline bool is_spanning_tree(const SpanningTreePlan& t) {
  if (t.n == 0) return t.edges.empty();
  if (t.edges.size() + 1 != t.n) return false;
  UnionFind uf(t.n);
  for (auto [u, v] : t.edges)
    if (u >= t.n || v >= t.n || !uf.unite(u, v)) return false;
  return uf.sets() == 1;
}

struct ClosedWalk {
  std::vector<VertexId> nodes;  // q_0 ... q_N with q_0 == q_N
  std::size_t steps() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Depth-first traversal from `root` that crosses every tree edge twice,
/// visiting children in ascending order.
inline ClosedWalk double_traversal_walk(const SpanningTreePlan& t, VertexId root) {
  require(root < t.n, "double_traversal_walk: root out of range");
  ClosedWalk w;
  w.nodes.push_back(root);
  std::vector<std::pair<VertexId, std::size_t>> stack{{root, 0}};
  std::vector<VertexId> parent(t.n, static_cast<VertexId>(-1));
  parent[root] = root;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < t.adj[v].size()) {
      const VertexId c = t.adj[v][next++];
      if (c == parent[v]) continue;
      parent[c] = v;
      w.nodes.push_back(c);
      stack.emplace_back(c, 0);
      continue;
    }
    stack.pop_back();
    if (!stack.empty()) w.nodes.push_back(stack.back().first);
  }
  return w;
}

}  // namespace rgg
