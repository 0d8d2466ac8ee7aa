#pragma once

// Slow reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rgg/geometry.hpp"
#include "rgg/graph.hpp"

namespace brute {

using rgg::GeometricGraph;
using rgg::VertexId;

inline double distance(const std::vector<double>& a, const std::vector<double>& b, double p) {
  double acc = 0.0;
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
    return acc;
  }
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(acc, 1.0 / p);
}

inline std::vector<VertexId> neighbors(const rgg::PointSet& pts, std::size_t i, double radius, double p) {
  std::vector<VertexId> out;
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (j != i && distance(pts.point(i), pts.point(j), p) <= radius) out.push_back(static_cast<VertexId>(j));
  return out;
}

inline std::vector<std::vector<bool>> matrix(const GeometricGraph& g) {
  std::vector<std::vector<bool>> m(g.n(), std::vector<bool>(g.n(), false));
  for (std::size_t v = 0; v < g.n(); ++v)
    for (auto w : g.neighbors(v)) m[v][w] = true;
  return m;
}

// Components of g with the vertices in `removed` deleted.
inline int components_without(const GeometricGraph& g, const std::vector<bool>& removed) {
  const std::size_t n = g.n();
  std::vector<int> seen(n, 0);
  int count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (removed[s] || seen[s]) continue;
    ++count;
    std::vector<std::size_t> todo{s};
    seen[s] = 1;
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      for (auto w : g.neighbors(v))
        if (!removed[w] && !seen[w]) {
          seen[w] = 1;
          todo.push_back(w);
        }
    }
  }
  return count;
}

// k-connected: more than k vertices and no separating set of size < k.
inline bool k_connected(const GeometricGraph& g, int k) {
  const std::size_t n = g.n();
  if (static_cast<int>(n) <= k) return false;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (std::popcount(mask) >= k) continue;
    std::vector<bool> removed(n);
    for (std::size_t v = 0; v < n; ++v) removed[v] = mask >> v & 1U;
    if (components_without(g, removed) != 1) return false;
  }
  return true;
}

inline bool is_cycle(const GeometricGraph& g, const std::vector<VertexId>& c) {
  if (c.size() < 3) return false;
  std::set<VertexId> s(c.begin(), c.end());
  if (s.size() != c.size()) return false;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!g.adjacent(c[i], c[(i + 1) % c.size()])) return false;
  return true;
}

// Smallest vertex whose removal disconnects the rest.
inline std::optional<VertexId> first_cut_vertex(const GeometricGraph& g) {
  const std::size_t n = g.n();
  if (n < 3) return std::nullopt;
  for (VertexId v = 0; v < n; ++v) {
    std::vector<char> seen(n, 0);
    seen[v] = 1;
    const VertexId start = v == 0 ? 1 : 0;
    std::vector<VertexId> stack{start};
    seen[start] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      for (VertexId y : g.neighbors(x))
        if (!seen[y]) {
          seen[y] = 1;
          ++reached;
          stack.push_back(y);
        }
    }
    if (reached != n - 1) return v;
  }
  return std::nullopt;
}

inline bool is_path(const GeometricGraph& g, const std::vector<VertexId>& p) {
  if (p.empty()) return false;
  std::set<VertexId> s(p.begin(), p.end());
  if (s.size() != p.size()) return false;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (!g.adjacent(p[i], p[i + 1])) return false;
  return true;
}

// Hamiltonicity by trying every permutation that fixes vertex 0.
inline bool hamiltonian(const GeometricGraph& g) {
  const std::size_t n = g.n();
  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const auto m = matrix(g);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = m[perm[i]][perm[(i + 1) % n]];
    if (ok) return true;
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return false;
}

// Cycle of exactly `len` vertices, by enumerating subsets and permutations.
inline bool has_cycle(const GeometricGraph& g, std::size_t len) {
  const std::size_t n = g.n();
  const auto m = matrix(g);
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != len) continue;
    std::vector<VertexId> sel;
    for (std::size_t v = 0; v < n; ++v)
      if (mask >> v & 1U) sel.push_back(static_cast<VertexId>(v));
    do {
      bool ok = true;
      for (std::size_t i = 0; i < len && ok; ++i) ok = m[sel[i]][sel[(i + 1) % len]];
      if (ok) return true;
    } while (std::next_permutation(sel.begin() + 1, sel.end()));
  }
  return false;
}

// Geometric cycle check straight from coordinates: distinct in-range
// vertices, exactly `len` of them, every cyclic step at most rho.
inline bool geometric_cycle(const rgg::PointSet& pts, double p, double rho, const std::vector<VertexId>& c,
                            std::size_t len) {
  if (c.size() != len || len < 3) return false;
  std::vector<char> seen(pts.size(), 0);
  for (VertexId v : c) {
    if (v >= pts.size() || seen[v]) return false;
    seen[v] = 1;
  }
  for (std::size_t i = 0; i < len; ++i)
    if (distance(pts.point(c[i]), pts.point(c[(i + 1) % len]), p) > rho) return false;
  return true;
}

inline double binomial_cdf(int n, double p, int k) {
  double total = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    total += std::exp(logc + j * std::log(p) + (n - j) * std::log1p(-p));
  }
  return total;
}

inline rgg::PointSet triangle345() {
  rgg::PointSet pts(2);
  pts.push_back({0.0, 0.0});
  pts.push_back({3.0, 0.0});
  pts.push_back({3.0, 4.0});
  return pts;
}

inline rgg::PointSet square_corners() {
  rgg::PointSet pts(2);
  pts.push_back({0.0, 0.0});
  pts.push_back({1.0, 0.0});
  pts.push_back({1.0, 1.0});
  pts.push_back({0.0, 1.0});
  return pts;
}

}  // namespace brute
