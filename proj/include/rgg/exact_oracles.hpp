#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/graph.hpp"

namespace rgg {

/// Largest vertex count accepted by the subset-DP Hamiltonicity test.
inline constexpr std::size_t kHamiltonianCeiling = 22;
/// Largest vertex count accepted by the cycle-length spectrum.
inline constexpr std::size_t kPancyclicCeiling = 18;

struct HamiltonResult {
  bool hamiltonian = false;
  std::vector<VertexId> cycle;  // witness in cyclic order when hamiltonian
};

namespace detail {

// Paths that start at `anchor` and use only vertices listed in `pool`
// (pool positions are the bit indices). ends[mask] holds the set of pool
// positions at which such a path covering exactly `mask` can end.
struct AnchoredPathTable {
  std::vector<std::uint32_t> ends;
  std::vector<std::uint32_t> pool_adj;  // adjacency inside the pool, by position
  std::uint32_t anchor_adj = 0;         // pool positions adjacent to the anchor

  AnchoredPathTable(const std::vector<std::uint64_t>& adj, VertexId anchor, std::span<const VertexId> pool) {
    const std::size_t m = pool.size();
    pool_adj.assign(m, 0);
    for (std::size_t a = 0; a < m; ++a) {
      if (adj[anchor] >> pool[a] & 1U) anchor_adj |= 1U << a;
      for (std::size_t b = 0; b < m; ++b)
        if (adj[pool[a]] >> pool[b] & 1U) pool_adj[a] |= 1U << b;
    }
    ends.assign(std::size_t{1} << m, 0);
    for (std::uint32_t mask = 1; mask < ends.size(); ++mask) {
      if (std::has_single_bit(mask)) {
        ends[mask] = mask & anchor_adj;
        continue;
      }
      std::uint32_t out = 0;
      for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
        const std::uint32_t bit = rest & (~rest + 1);
        const auto v = static_cast<std::size_t>(std::countr_zero(bit));
        if (pool_adj[v] & ends[mask ^ bit]) out |= bit;
      }
      ends[mask] = out;
    }
  }

  // Vertex sequence anchor, ..., end of a path covering `mask` and ending at pool position `end`.
  std::vector<VertexId> path(VertexId anchor, std::span<const VertexId> pool, std::uint32_t mask,
                             std::size_t end) const {
    std::vector<VertexId> rev;
    while (true) {
      rev.push_back(pool[end]);
      const std::uint32_t rest = mask ^ (1U << end);
      if (rest == 0) break;
      const std::uint32_t cand = ends[rest] & pool_adj[end];
      end = static_cast<std::size_t>(std::countr_zero(cand));
      mask = rest;
    }
    rev.push_back(anchor);
    std::reverse(rev.begin(), rev.end());
    return rev;
  }
};

}  // namespace detail

/// Exact Hamiltonicity by dynamic programming over vertex subsets anchored at vertex 0.
inline HamiltonResult is_hamiltonian_exact(const GeometricGraph& g) {
  const std::size_t n = g.n();
  if (n < 3 || n > kHamiltonianCeiling)
    throw CapacityError("is_hamiltonian_exact: n must lie in [3, " + std::to_string(kHamiltonianCeiling) + "]");
  const auto adj = g.adjacency_masks();
  std::vector<VertexId> pool(n - 1);
  for (std::size_t i = 1; i < n; ++i) pool[i - 1] = static_cast<VertexId>(i);
  const detail::AnchoredPathTable table(adj, 0, pool);
  const std::uint32_t full = static_cast<std::uint32_t>((std::size_t{1} << (n - 1)) - 1);
  const std::uint32_t closing = table.ends[full] & table.anchor_adj;
  HamiltonResult out;
  if (closing == 0) return out;
  out.hamiltonian = true;
  out.cycle = table.path(0, pool, full, static_cast<std::size_t>(std::countr_zero(closing)));
  return out;
}

/// Bit l is set iff the graph has a simple cycle on exactly l vertices (l >= 3).
inline std::vector<bool> cycle_length_spectrum(const GeometricGraph& g) {
  const std::size_t n = g.n();
  if (n > kPancyclicCeiling)
    throw CapacityError("cycle_length_spectrum: n must be at most " + std::to_string(kPancyclicCeiling));
  std::vector<bool> present(n + 1, false);
  if (n < 3) return present;
  const auto adj = g.adjacency_masks();
  for (VertexId s = 0; s + 2 < n; ++s) {
    std::vector<VertexId> pool;
    for (VertexId v = s + 1; v < n; ++v) pool.push_back(v);
    const detail::AnchoredPathTable table(adj, s, pool);
    for (std::uint32_t mask = 1; mask < table.ends.size(); ++mask) {
      const int len = std::popcount(mask) + 1;
      if (len >= 3 && !present[len] && (table.ends[mask] & table.anchor_adj)) present[len] = true;
    }
  }
  return present;
}

/// A simple cycle on exactly `length` vertices, if one exists.
inline std::optional<std::vector<VertexId>> find_cycle_of_length(const GeometricGraph& g, std::size_t length) {
  const std::size_t n = g.n();
  if (length < 3 || length > n || n > kPancyclicCeiling)
    throw CapacityError("find_cycle_of_length: need 3 <= length <= n <= " + std::to_string(kPancyclicCeiling));
  const auto adj = g.adjacency_masks();
  for (VertexId s = 0; s + length <= n; ++s) {
    std::vector<VertexId> pool;
    for (VertexId v = s + 1; v < n; ++v) pool.push_back(v);
    const detail::AnchoredPathTable table(adj, s, pool);
    for (std::uint32_t mask = 1; mask < table.ends.size(); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) + 1 != length) continue;
      const std::uint32_t closing = table.ends[mask] & table.anchor_adj;
      if (closing) return table.path(s, pool, mask, static_cast<std::size_t>(std::countr_zero(closing)));
    }
  }
  return std::nullopt;
}

inline bool has_cycle_of_length(const GeometricGraph& g, std::size_t length) {
  const std::size_t n = g.n();
  if (length < 3 || length > n || n > kPancyclicCeiling)
    throw CapacityError("has_cycle_of_length: need 3 <= length <= n <= " + std::to_string(kPancyclicCeiling));
  return find_cycle_of_length(g, length).has_value();
}

namespace detail {

// Residual network with integer capacities and costs.
class FlowNetwork {
 public:
  struct Arc {
    int to;
    int rev;
    int cap;
    int cost;
  };

  explicit FlowNetwork(std::size_t nodes) : arcs_(nodes), forward_(nodes) {}

  void add_arc(int from, int to, int cap, int cost = 0) {
    arcs_[from].push_back({to, static_cast<int>(arcs_[to].size()), cap, cost});
    forward_[from].push_back(1);
    arcs_[to].push_back({from, static_cast<int>(arcs_[from].size()) - 1, 0, -cost});
    forward_[to].push_back(0);
  }

  std::size_t size() const noexcept { return arcs_.size(); }
  std::vector<Arc>& out(int v) { return arcs_[v]; }

  // One BFS augmenting path of unit value; false when none exists.
  bool augment_unit(int s, int t) {
    std::vector<std::pair<int, int>> via(arcs_.size(), {-1, -1});
    std::deque<int> q{s};
    via[s] = {s, -1};
    while (!q.empty() && via[t].first < 0) {
      const int v = q.front();
      q.pop_front();
      for (int k = 0; k < static_cast<int>(arcs_[v].size()); ++k) {
        const Arc& a = arcs_[v][k];
        if (a.cap > 0 && via[a.to].first < 0) {
          via[a.to] = {v, k};
          q.push_back(a.to);
        }
      }
    }
    if (via[t].first < 0) return false;
    push_along(s, t, via, 1);
    return true;
  }

  // Cheapest augmenting path (Bellman-Ford queue variant, tolerates negative
  // residual costs); pushes `amount` units when the path admits them.
  int augment_cheapest(int s, int t, int amount) {
    const int inf = std::numeric_limits<int>::max();
    std::vector<int> dist(arcs_.size(), inf);
    std::vector<std::pair<int, int>> via(arcs_.size(), {-1, -1});
    std::vector<char> queued(arcs_.size(), 0);
    std::deque<int> q{s};
    dist[s] = 0;
    queued[s] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      queued[v] = 0;
      for (int k = 0; k < static_cast<int>(arcs_[v].size()); ++k) {
        const Arc& a = arcs_[v][k];
        if (a.cap <= 0) continue;
        const int nd = dist[v] + a.cost;
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          via[a.to] = {v, k};
          if (!queued[a.to]) {
            queued[a.to] = 1;
            q.push_back(a.to);
          }
        }
      }
    }
    if (dist[t] == inf) return 0;
    int room = amount;
    for (int v = t; v != s; v = via[v].first) room = std::min(room, arcs_[via[v].first][via[v].second].cap);
    push_along(s, t, via, room);
    return room;
  }

  // Flow carried by every forward arc, indexed like arcs_.
  std::vector<std::vector<int>> forward_flows() const {
    std::vector<std::vector<int>> f(arcs_.size());
    for (std::size_t v = 0; v < arcs_.size(); ++v) {
      f[v].assign(arcs_[v].size(), 0);
      for (std::size_t k = 0; k < arcs_[v].size(); ++k) {
        const Arc& a = arcs_[v][k];
        if (forward_[v][k]) f[v][k] = arcs_[a.to][a.rev].cap;
      }
    }
    return f;
  }

  // Index of a forward arc out of v with remaining flow, consuming one unit; -1 if none.
  int take_flow_arc(int v, std::vector<std::vector<int>>& flows) const {
    for (std::size_t k = 0; k < arcs_[v].size(); ++k) {
      if (forward_[v][k] && flows[v][k] > 0) {
        --flows[v][k];
        return static_cast<int>(k);
      }
    }
    return -1;
  }

 private:
  void push_along(int s, int t, const std::vector<std::pair<int, int>>& via, int amount) {
    for (int v = t; v != s; v = via[v].first) {
      Arc& a = arcs_[via[v].first][via[v].second];
      a.cap -= amount;
      arcs_[a.to][a.rev].cap += amount;
    }
  }

  std::vector<std::vector<Arc>> arcs_;
  std::vector<std::vector<char>> forward_;
};

// Number of internally vertex-disjoint s-t paths, capped at `limit`.
inline int local_connectivity(const GeometricGraph& g, VertexId s, VertexId t, int limit) {
  const int n = static_cast<int>(g.n());
  FlowNetwork net(2 * static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) net.add_arc(2 * v, 2 * v + 1, (v == static_cast<int>(s) || v == static_cast<int>(t)) ? limit : 1);
  for (int v = 0; v < n; ++v)
    for (VertexId w : g.neighbors(v)) net.add_arc(2 * v + 1, 2 * static_cast<int>(w), 1);
  int flow = 0;
  while (flow < limit && net.augment_unit(2 * static_cast<int>(s) + 1, 2 * static_cast<int>(t))) ++flow;
  return flow;
}

}  // namespace detail

/// Whether g is k-connected: n > k and removing any < k vertices leaves it connected.
/// Checks local connectivity (unit-capacity flow on the vertex-split graph)
/// between each of the first k vertices and every later vertex.
inline bool vertex_connectivity_at_least(const GeometricGraph& g, int k) {
  require(static_cast<long>(g.n()) > k, "vertex_connectivity_at_least: need n > k");
  if (k <= 0) return true;
  if (!is_connected(g)) return false;
  if (k == 1) return true;
  if (min_degree(g) < static_cast<std::size_t>(k)) return false;
  const auto n = static_cast<VertexId>(g.n());
  for (VertexId i = 0; i < static_cast<VertexId>(k); ++i)
    for (VertexId j = i + 1; j < n; ++j)
      if (detail::local_connectivity(g, i, j, k) < k) return false;
  return true;
}

/// Linear-time 2-connectivity test (no articulation point, n >= 3, connected).
inline bool is_biconnected(const GeometricGraph& g) {
  const std::size_t n = g.n();
  if (n < 3) return false;
  std::vector<std::uint32_t> disc(n, 0), low(n, 0);
  std::vector<std::size_t> next(n, 0);
  std::vector<VertexId> parent(n, static_cast<VertexId>(-1));
  std::vector<VertexId> stack{0};
  std::uint32_t clock = 1;
  disc[0] = low[0] = clock++;
  std::size_t root_children = 0;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    auto nb = g.neighbors(v);
    if (next[v] < nb.size()) {
      const VertexId w = nb[next[v]++];
      if (disc[w] == 0) {
        parent[w] = v;
        disc[w] = low[w] = clock++;
        if (v == 0) ++root_children;
        stack.push_back(w);
      } else if (w != parent[v]) {
        low[v] = std::min(low[v], disc[w]);
      }
      continue;
    }
    stack.pop_back();
    if (v == 0) continue;
    const VertexId p = parent[v];
    low[p] = std::min(low[p], low[v]);
    if (p != 0 && low[v] >= disc[p]) return false;
  }
  if (clock - 1 != n) return false;
  return root_children <= 1;
}

/// Smallest articulation point of a connected graph, if any (for diagnostics).
inline std::optional<VertexId> find_cut_vertex(const GeometricGraph& g) {
  const std::size_t n = g.n();
  if (n < 3) return std::nullopt;
  std::vector<std::uint32_t> disc(n, 0), low(n, 0);
  std::vector<std::size_t> next(n, 0);
  std::vector<VertexId> parent(n, static_cast<VertexId>(-1));
  std::vector<char> cut(n, 0);
  std::vector<VertexId> stack{0};
  std::uint32_t clock = 1;
  disc[0] = low[0] = clock++;
  std::size_t root_children = 0;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    auto nb = g.neighbors(v);
    if (next[v] < nb.size()) {
      const VertexId w = nb[next[v]++];
      if (disc[w] == 0) {
        parent[w] = v;
        disc[w] = low[w] = clock++;
        if (v == 0) ++root_children;
        stack.push_back(w);
      } else if (w != parent[v]) {
        low[v] = std::min(low[v], disc[w]);
      }
      continue;
    }
    stack.pop_back();
    if (v == 0) continue;
    const VertexId p = parent[v];
    low[p] = std::min(low[p], low[v]);
    if (p != 0 && low[v] >= disc[p]) cut[p] = 1;
  }
  cut[0] = root_children > 1;
  for (VertexId v = 0; v < n; ++v)
    if (cut[v]) return v;
  return std::nullopt;
}

struct PathPair {
  std::vector<VertexId> first;
  std::vector<VertexId> second;
};

enum class EndpointMode {
  Disjoint,        // the paths share no vertex at all
  ShareEndpoint,   // a singleton side may be shared by both paths
};

/// Two paths from A to B, each meeting A only at its first vertex and B only
/// at its last, vertex-disjoint except for a shared singleton side when the
/// mode allows it. Total edge count is minimised (min-cost flow of value 2).
/// Vertices flagged in `forbidden` are never used.
inline PathPair two_disjoint_paths(const GeometricGraph& g, std::span<const VertexId> A, std::span<const VertexId> B,
                                   EndpointMode mode, std::span<const char> forbidden = {}) {
  const std::size_t n = g.n();
  require(!A.empty() && !B.empty(), "two_disjoint_paths: A and B must be nonempty");
  std::vector<char> role(n, 0);  // 1 = A, 2 = B
  for (VertexId a : A) {
    require(a < n, "two_disjoint_paths: vertex out of range");
    role[a] = 1;
  }
  for (VertexId b : B) {
    require(b < n, "two_disjoint_paths: vertex out of range");
    require(role[b] != 1, "two_disjoint_paths: A and B must be disjoint");
    role[b] = 2;
  }
  auto banned = [&](VertexId v) { return !forbidden.empty() && forbidden[v] && role[v] == 0; };
  const bool share_a = mode == EndpointMode::ShareEndpoint && A.size() == 1;
  const bool share_b = mode == EndpointMode::ShareEndpoint && B.size() == 1;

  // Node 2v = v_in, 2v+1 = v_out; A vertices only emit, B vertices only absorb.
  const int source = static_cast<int>(2 * n), sink = source + 1;
  detail::FlowNetwork net(2 * n + 2);
  for (VertexId v = 0; v < n; ++v) {
    const int in = 2 * static_cast<int>(v), out = in + 1;
    if (role[v] == 1) {
      net.add_arc(source, out, share_a ? 2 : 1);
    } else if (role[v] == 2) {
      net.add_arc(in, sink, share_b ? 2 : 1);
    } else if (!banned(v)) {
      net.add_arc(in, out, 1);
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    if (role[v] == 2 || banned(v)) continue;
    for (VertexId w : g.neighbors(v)) {
      if (role[w] == 1 || banned(w)) continue;
      net.add_arc(2 * static_cast<int>(v) + 1, 2 * static_cast<int>(w), 1, 1);
    }
  }
  int flow = 0;
  while (flow < 2) {
    const int pushed = net.augment_cheapest(source, sink, 2 - flow);
    if (pushed == 0) break;
    flow += pushed;
  }
  if (flow < 2) throw InfeasibleError("two_disjoint_paths: no admissible pair of paths");

  // Decompose the flow: follow forward arcs that still carry flow.
  auto flow_on = net.forward_flows();
  auto walk = [&]() {
    std::vector<VertexId> path;
    int v = source;
    while (v != sink) {
      const int k = net.take_flow_arc(v, flow_on);
      if (k < 0) throw InfeasibleError("two_disjoint_paths: flow decomposition failed");
      v = net.out(v)[k].to;
      if (v < source) {
        const auto vertex = static_cast<VertexId>(v / 2);
        if (path.empty() || path.back() != vertex) path.push_back(vertex);
      }
    }
    return path;
  };
  PathPair out{walk(), walk()};
  return out;
}

}  // namespace rgg
