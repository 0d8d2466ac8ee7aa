#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"

namespace rgg {

/// Largest point count for which the full sorted edge list is materialized.
inline constexpr std::size_t kMaxMaterializedVertices = 3000;

/// Simple undirected graph with sorted adjacency lists; for geometric graphs
/// radius() records the closed threshold that generated the edges.
class GeometricGraph {
 public:
  GeometricGraph() = default;
  explicit GeometricGraph(std::size_t n, double radius = 0.0) : radius_(radius), adj_(n) {}

  GeometricGraph(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges, double radius = 0.0)
      : radius_(radius), adj_(n) {
    for (auto [u, v] : edges) add_edge(u, v);
    finalize();
  }

  /// Adds u-v; call finalize() once after the last insertion.
  void add_edge(VertexId u, VertexId v) {
    require(u < adj_.size() && v < adj_.size() && u != v, "GeometricGraph: bad edge endpoint");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }

  void finalize() {
    edges_ = 0;
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
      edges_ += a.size();
    }
    edges_ /= 2;
  }

  std::size_t n() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  double radius() const noexcept { return radius_; }
  std::span<const VertexId> neighbors(std::size_t v) const noexcept { return adj_[v]; }
  std::size_t degree(std::size_t v) const noexcept { return adj_[v].size(); }

  bool adjacent(VertexId u, VertexId v) const noexcept {
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

  /// Row-bitmask adjacency for graphs of at most 64 vertices.
  std::vector<std::uint64_t> adjacency_masks() const {
    require(n() <= 64, "adjacency_masks: graph has more than 64 vertices");
    std::vector<std::uint64_t> m(n(), 0);
    for (std::size_t v = 0; v < n(); ++v)
      for (VertexId w : adj_[v]) m[v] |= std::uint64_t{1} << w;
    return m;
  }

 private:
  double radius_ = 0.0;
  std::size_t edges_ = 0;
  std::vector<std::vector<VertexId>> adj_;
};

struct ComponentLabeling {
  std::vector<std::uint32_t> labels;
  std::uint32_t count = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    return true;
  }
  std::size_t sets() const noexcept { return sets_; }

 private:
  std::vector<std::size_t> parent_, size_;
  std::size_t sets_;
};

inline std::size_t min_degree(const GeometricGraph& g) {
  require(g.n() >= 1, "min_degree: graph has no vertices");
  std::size_t m = g.degree(0);
  for (std::size_t v = 1; v < g.n(); ++v) m = std::min(m, g.degree(v));
  return m;
}

/// Components numbered in order of their smallest vertex.
inline ComponentLabeling connected_components(const GeometricGraph& g) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  ComponentLabeling out;
  out.labels.assign(g.n(), unset);
  std::vector<VertexId> stack;
  for (std::size_t s = 0; s < g.n(); ++s) {
    if (out.labels[s] != unset) continue;
    out.labels[s] = out.count;
    stack.push_back(static_cast<VertexId>(s));
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : g.neighbors(v)) {
        if (out.labels[w] == unset) {
          out.labels[w] = out.count;
          stack.push_back(w);
        }
      }
    }
    ++out.count;
  }
  return out;
}

inline bool is_connected(const GeometricGraph& g) { return g.n() <= 1 || connected_components(g).count == 1; }

struct ProcessEdge {
  VertexId u;
  VertexId v;
  double length;
};

/// Unordered point pairs sorted by length, ties by (u, v) lexicographically.
/// A truncated process holds only the pairs of length <= cap().
class EdgeProcess {
 public:
  EdgeProcess(PointSet points, NormSpec norm, std::vector<ProcessEdge> edges, double cap)
      : points_(std::move(points)), norm_(norm), edges_(std::move(edges)), cap_(cap) {
    std::sort(edges_.begin(), edges_.end(), [](const ProcessEdge& a, const ProcessEdge& b) {
      if (a.length != b.length) return a.length < b.length;
      if (a.u != b.u) return a.u < b.u;
      return a.v < b.v;
    });
    const std::size_t n = points_.size();
    complete_ = edges_.size() == n * (n - 1) / 2;
  }

  const PointSet& points() const noexcept { return points_; }
  const NormSpec& norm() const noexcept { return norm_; }
  std::size_t n() const noexcept { return points_.size(); }
  std::size_t size() const noexcept { return edges_.size(); }
  const ProcessEdge& operator[](std::size_t k) const noexcept { return edges_[k]; }
  std::span<const ProcessEdge> edges() const noexcept { return edges_; }
  double length(std::size_t k) const noexcept { return edges_[k].length; }

  /// True when every unordered pair is present.
  bool complete() const noexcept { return complete_; }
  /// Every pair of length <= cap() is present.
  double cap() const noexcept { return complete_ ? std::numeric_limits<double>::infinity() : cap_; }

  /// Last index whose length equals length(k).
  std::size_t tie_end(std::size_t k) const noexcept {
    while (k + 1 < edges_.size() && edges_[k + 1].length == edges_[k].length) ++k;
    return k;
  }

  /// Number of edges with length <= radius.
  std::size_t count_within(double radius) const noexcept {
    return static_cast<std::size_t>(
        std::upper_bound(edges_.begin(), edges_.end(), radius,
                         [](double r, const ProcessEdge& e) { return r < e.length; }) -
        edges_.begin());
  }

  /// Graph made of the first `count` edges of the process.
  GeometricGraph prefix_graph(std::size_t count) const {
    GeometricGraph g(n(), count == 0 ? 0.0 : edges_[count - 1].length);
    for (std::size_t k = 0; k < count; ++k) g.add_edge(edges_[k].u, edges_[k].v);
    g.finalize();
    return g;
  }

 private:
  PointSet points_;
  NormSpec norm_;
  std::vector<ProcessEdge> edges_;
  double cap_;
  bool complete_ = false;
};

inline EdgeProcess build_edge_process(const PointSet& points, const NormSpec& norm) {
  const std::size_t n = points.size();
  if (n < 2) throw EmptyInput("build_edge_process: need at least two points");
  require(points.dim() == static_cast<std::size_t>(norm.d()), "build_edge_process: dimension mismatch");
  if (n > kMaxMaterializedVertices)
    throw CapacityError("build_edge_process: full process is limited to " +
                        std::to_string(kMaxMaterializedVertices) + " points; use build_edge_process_within");
  std::vector<ProcessEdge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (VertexId i = 0; i < n; ++i)
    for (VertexId j = i + 1; j < n; ++j) edges.push_back({i, j, norm.distance(points[i], points[j])});
  return EdgeProcess(points, norm, std::move(edges), std::numeric_limits<double>::infinity());
}

/// The prefix of the process consisting of all pairs of length <= cap.
inline EdgeProcess build_edge_process_within(const PointSet& points, const NormSpec& norm, double cap) {
  const std::size_t n = points.size();
  if (n < 2) throw EmptyInput("build_edge_process_within: need at least two points");
  require(cap >= 0.0, "build_edge_process_within: cap must be nonnegative");
  require(points.dim() == static_cast<std::size_t>(norm.d()), "build_edge_process_within: dimension mismatch");
  std::vector<ProcessEdge> edges;
  if (cap == 0.0 || !std::isfinite(cap)) {
    for (VertexId i = 0; i < n; ++i)
      for (VertexId j = i + 1; j < n; ++j) {
        const double len = norm.distance(points[i], points[j]);
        if (len <= cap) edges.push_back({i, j, len});
      }
  } else {
    const GridIndex idx(points, cap);
    for (VertexId i = 0; i < n; ++i)
      idx.for_each_within(points[i], cap, norm, i, [&](VertexId j, double len) {
        if (j > i) edges.push_back({i, j, len});
      });
  }
  return EdgeProcess(points, norm, std::move(edges), cap);
}

/// G(V, radius) read off the process (closed threshold).
inline GeometricGraph graph_at_radius(const EdgeProcess& proc, double radius) {
  require(radius >= 0.0, "graph_at_radius: radius must be nonnegative");
  require(radius <= proc.cap(), "graph_at_radius: radius exceeds the truncation cap of the process");
  GeometricGraph g(proc.n(), radius);
  const std::size_t count = proc.count_within(radius);
  for (std::size_t k = 0; k < count; ++k) g.add_edge(proc[k].u, proc[k].v);
  g.finalize();
  return g;
}

/// G(V, radius) built directly from a grid index, for point sets too large
/// for a materialized process.
inline GeometricGraph graph_at_radius(const PointSet& points, const NormSpec& norm, double radius) {
  require(radius >= 0.0, "graph_at_radius: radius must be nonnegative");
  GeometricGraph g(points.size(), radius);
  if (points.size() < 2) return g;
  const double side = radius > 0.0 ? radius : 1.0;
  const GridIndex idx(points, side);
  for (VertexId i = 0; i < points.size(); ++i)
    idx.for_each_within(points[i], radius, norm, i, [&](VertexId j, double) {
      if (j > i) g.add_edge(i, j);
    });
  g.finalize();
  return g;
}

/// k-th smallest distance from point i to another point.
inline double kth_nearest_distance(const EdgeProcess& proc, std::size_t i, std::size_t k) {
  require(i < proc.n(), "kth_nearest_distance: unknown vertex");
  require(k >= 1 && k + 1 <= proc.n(), "kth_nearest_distance: k must lie in [1, n-1]");
  std::size_t seen = 0;
  for (const auto& e : proc.edges()) {
    if (e.u == i || e.v == i) {
      if (++seen == k) return e.length;
    }
  }
  throw ContractViolation("kth_nearest_distance: process is truncated below the k-th neighbour");
}

/// k-th nearest-neighbour distance of every point, via expanding grid searches.
inline std::vector<double> kth_nearest_distances(const PointSet& points, const NormSpec& norm, std::size_t k) {
  const std::size_t n = points.size();
  require(k >= 1 && k + 1 <= n, "kth_nearest_distances: k must lie in [1, n-1]");
  const double d = static_cast<double>(points.dim());
  const double r0 = std::pow(static_cast<double>(k + 4) / static_cast<double>(n), 1.0 / d);
  const GridIndex idx(points, r0);
  std::vector<double> out(n);
  std::vector<double> dist;
  for (std::size_t i = 0; i < n; ++i) {
    double r = r0;
    while (true) {
      dist.clear();
      idx.for_each_within(points[i], r, norm, i, [&](VertexId, double len) { dist.push_back(len); });
      if (dist.size() >= k) break;
      r *= 2.0;
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    out[i] = dist[k - 1];
  }
  return out;
}

}  // namespace rgg
