#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/graph.hpp"

/// Slow reference oracles used to cross-check the exact ones.
namespace rgg::reference {

/// Hamiltonicity by enumerating every cyclic order with vertex 0 fixed.
inline bool hamiltonian_by_permutations(const GeometricGraph& g) {
  const std::size_t n = g.n();
  require(n <= 11, "hamiltonian_by_permutations: n must be at most 11");
  if (n < 3) return false;
  std::vector<VertexId> order(n - 1);
  std::iota(order.begin(), order.end(), VertexId{1});
  do {
    if (order.front() > order.back()) continue;  // each cycle once per direction
    bool ok = g.adjacent(0, order.front()) && g.adjacent(order.back(), 0);
    for (std::size_t k = 0; ok && k + 1 < order.size(); ++k) ok = g.adjacent(order[k], order[k + 1]);
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

/// k-vertex-connectivity by removing every vertex subset of size < k.
inline bool k_connected_by_removal(const GeometricGraph& g, int k) {
  const std::size_t n = g.n();
  require(n <= 16, "k_connected_by_removal: n must be at most 16");
  if (k <= 0) return true;
  if (n < static_cast<std::size_t>(k) + 1) return false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) >= k) continue;
    std::vector<char> seen(n, 0);
    std::size_t alive = 0, start = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!(mask >> v & 1)) {
        ++alive;
        if (start == n) start = v;
      }
    std::vector<VertexId> stack{static_cast<VertexId>(start)};
    seen[start] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      for (VertexId y : g.neighbors(x))
        if (!(mask >> y & 1) && !seen[y]) {
          seen[y] = 1;
          ++reached;
          stack.push_back(y);
        }
    }
    if (reached != alive) return false;
  }
  return true;
}

}  // namespace rgg::reference
