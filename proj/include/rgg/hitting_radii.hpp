#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/exact_oracles.hpp"
#include "rgg/graph.hpp"

namespace rgg {

/// A hitting radius located on the edge process. `rank` is the index of the
/// last edge of the tie group whose insertion makes the property hold, or -1
/// when the empty graph already has it (radius 0). Equal ranks imply equal
/// radii and, thanks to the tie normalisation, the converse holds too.
struct Hitting {
  std::ptrdiff_t rank = -1;
  double radius = 0.0;

  friend bool operator==(const Hitting&, const Hitting&) = default;
};

using GraphPredicate = std::function<bool(const GeometricGraph&)>;
using ConnectivityOracle = std::function<bool(const GeometricGraph&, int)>;
using HamiltonOracle = std::function<bool(const GeometricGraph&)>;

namespace detail {

inline Hitting at_rank(const EdgeProcess& proc, std::size_t k) {
  const std::size_t end = proc.tie_end(k);
  return {static_cast<std::ptrdiff_t>(end), proc.length(end)};
}

// Smallest count c in [lo, hi] with holds(c), given holds(hi) and monotonicity.
template <class F>
std::size_t first_true(std::size_t lo, std::size_t hi, F&& holds) {
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (holds(mid)) hi = mid;
    else lo = mid + 1;
  }
  return hi;
}

// Missing property on a truncated process is "not yet reached"; on a
// complete one it is unsatisfiable.
inline std::optional<Hitting> not_reached(const EdgeProcess& proc, const char* what) {
  if (proc.complete()) throw UnsatisfiableProperty(std::string(what) + ": false on the complete graph");
  return std::nullopt;
}

}  // namespace detail

/// Hitting radius of a monotone predicate, by binary search over edge ranks.
/// Returns nullopt when a truncated process ends before the predicate holds.
inline std::optional<Hitting> rho_property(const EdgeProcess& proc, const GraphPredicate& holds) {
  if (holds(proc.prefix_graph(0))) return Hitting{};
  const std::size_t m = proc.size();
  if (m == 0 || !holds(proc.prefix_graph(m))) return detail::not_reached(proc, "rho_property");
  const std::size_t c = detail::first_true(1, m, [&](std::size_t k) { return holds(proc.prefix_graph(k)); });
  return detail::at_rank(proc, c - 1);
}

/// Hitting radius of "minimum degree >= k", by scanning degrees along the process.
inline std::optional<Hitting> rho_min_degree(const EdgeProcess& proc, std::size_t k) {
  const std::size_t n = proc.n();
  require(k >= 1 && k + 1 <= n, "rho_min_degree: k must lie in [1, n-1]");
  std::vector<std::size_t> deg(n, 0);
  std::size_t satisfied = 0;
  for (std::size_t e = 0; e < proc.size(); ++e) {
    if (++deg[proc[e].u] == k) ++satisfied;
    if (++deg[proc[e].v] == k) ++satisfied;
    if (satisfied == n) return detail::at_rank(proc, e);
  }
  return detail::not_reached(proc, "rho_min_degree");
}

/// Closed-form route: the largest k-th nearest-neighbour distance.
inline double rho_min_degree_radius(const PointSet& points, const NormSpec& norm, std::size_t k) {
  const auto dist = kth_nearest_distances(points, norm, k);
  return *std::max_element(dist.begin(), dist.end());
}

inline std::optional<Hitting> rho_connected(const EdgeProcess& proc) {
  const std::size_t n = proc.n();
  if (n <= 1) return Hitting{};
  UnionFind uf(n);
  for (std::size_t e = 0; e < proc.size(); ++e) {
    if (uf.unite(proc[e].u, proc[e].v) && uf.sets() == 1) return detail::at_rank(proc, e);
  }
  return detail::not_reached(proc, "rho_connected");
}

inline bool default_connectivity_oracle(const GeometricGraph& g, int k) {
  if (k == 1) return is_connected(g);
  if (k == 2) return is_biconnected(g);
  return vertex_connectivity_at_least(g, k);
}

/// Hitting radius of k-connectivity. The search starts at the min-degree-k
/// rank, below which no graph is k-connected.
inline std::optional<Hitting> rho_k_connected(const EdgeProcess& proc, int k,
                                              const ConnectivityOracle& oracle = default_connectivity_oracle) {
  require(k >= 1 && static_cast<long>(proc.n()) > k, "rho_k_connected: need 1 <= k < n");
  const auto md = rho_min_degree(proc, static_cast<std::size_t>(k));
  if (!md) return std::nullopt;
  const std::size_t m = proc.size();
  const std::size_t lo = static_cast<std::size_t>(md->rank) + 1;
  if (!oracle(proc.prefix_graph(m), k)) return detail::not_reached(proc, "rho_k_connected");
  const std::size_t c = detail::first_true(lo, m, [&](std::size_t cnt) { return oracle(proc.prefix_graph(cnt), k); });
  return detail::at_rank(proc, c - 1);
}

/// Exact Hamiltonicity hitting radius. The search gallops upward from
/// `lower` (a rank known not to exceed the answer, e.g. the 2-connectivity
/// hitting rank) and then bisects, so the common coincidence case costs one
/// oracle call.
inline Hitting rho_hamiltonian_exact(const EdgeProcess& proc, std::optional<Hitting> lower = std::nullopt,
                                     const HamiltonOracle& oracle = [](const GeometricGraph& g) {
                                       return is_hamiltonian_exact(g).hamiltonian;
                                     }) {
  const std::size_t n = proc.n();
  require(n >= 3, "rho_hamiltonian_exact: need at least three points");
  if (n > kHamiltonianCeiling)
    throw CapacityError("rho_hamiltonian_exact: n exceeds the exact-oracle ceiling");
  require(proc.complete(), "rho_hamiltonian_exact: needs a complete edge process");
  const std::size_t m = proc.size();
  const std::size_t start = lower ? static_cast<std::size_t>(std::max<std::ptrdiff_t>(lower->rank, 0)) + 1 : 1;
  std::size_t below = start - 1;  // prefix sizes <= below are known (or assumed) non-Hamiltonian
  std::size_t step = 1;
  std::size_t probe = start;
  while (true) {
    probe = std::min(probe, m);
    if (oracle(proc.prefix_graph(probe))) break;
    if (probe == m) throw UnsatisfiableProperty("rho_hamiltonian_exact: complete graph is not Hamiltonian");
    below = probe;
    probe += step;
    step *= 2;
  }
  const std::size_t c =
      detail::first_true(below + 1, probe, [&](std::size_t cnt) { return oracle(proc.prefix_graph(cnt)); });
  return detail::at_rank(proc, c - 1);
}

/// pi n r^2 - (ln n + ln ln n), the normalisation for d = 2, p = 2.
inline double x_statistic(std::size_t n, double radius) {
  require(n >= 3, "x_statistic: n must be at least 3");
  const double nn = static_cast<double>(n);
  return std::numbers::pi * nn * radius * radius - (std::log(nn) + std::log(std::log(nn)));
}

struct HittingReport {
  std::map<int, Hitting> rho_min_degree;
  Hitting rho_connected;
  std::map<int, Hitting> rho_k_connected;
  std::optional<Hitting> rho_hamiltonian;
  double x_statistic = std::numeric_limits<double>::quiet_NaN();  // at rho_min_degree[2]; d=2, p=2 only
};

struct ReportOptions {
  int k_max = 3;
  /// k-connectivity radii are computed for k <= min(k_max, k_connected_max).
  int k_connected_max = 2;
  bool exact_hamiltonian = false;
};

/// All hitting radii of one point set. Small inputs use the complete
/// process; larger ones a truncated process whose cap grows until every
/// requested property has been reached.
inline HittingReport compute_hitting_report(const PointSet& points, const NormSpec& norm,
                                            const ReportOptions& opt = {}) {
  const std::size_t n = points.size();
  require(n >= 3, "compute_hitting_report: need at least three points");
  const int k_max = std::min<int>(opt.k_max, static_cast<int>(n) - 1);
  require(k_max >= 1, "compute_hitting_report: k_max must be positive");
  const int kc_max = std::min(k_max, opt.k_connected_max);
  if (opt.exact_hamiltonian && n > kHamiltonianCeiling)
    throw CapacityError("compute_hitting_report: exact Hamiltonicity needs n <= " +
                        std::to_string(kHamiltonianCeiling));

  auto attempt = [&](const EdgeProcess& proc) -> std::optional<HittingReport> {
    HittingReport rep;
    for (int k = 1; k <= k_max; ++k) {
      auto h = rho_min_degree(proc, static_cast<std::size_t>(k));
      if (!h) return std::nullopt;
      rep.rho_min_degree[k] = *h;
    }
    auto conn = rho_connected(proc);
    if (!conn) return std::nullopt;
    rep.rho_connected = *conn;
    for (int k = 1; k <= kc_max; ++k) {
      auto h = k == 1 ? conn : rho_k_connected(proc, k);
      if (!h) return std::nullopt;
      rep.rho_k_connected[k] = *h;
    }
    if (opt.exact_hamiltonian) {
      std::optional<Hitting> lower;
      if (rep.rho_k_connected.count(2)) lower = rep.rho_k_connected.at(2);
      rep.rho_hamiltonian = rho_hamiltonian_exact(proc, lower);
    }
    if (norm.is_euclidean_plane() && rep.rho_min_degree.count(2))
      rep.x_statistic = x_statistic(n, rep.rho_min_degree.at(2).radius);
    return rep;
  };

  if (n <= kMaxMaterializedVertices) return *attempt(build_edge_process(points, norm));
  double cap = rho_min_degree_radius(points, norm, static_cast<std::size_t>(k_max));
  while (true) {
    if (auto rep = attempt(build_edge_process_within(points, norm, cap))) return *rep;
    cap *= 1.25;
  }
}

}  // namespace rgg
