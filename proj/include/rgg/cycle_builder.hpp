#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "rgg/cleanup.hpp"
#include "rgg/dissection.hpp"
#include "rgg/errors.hpp"
#include "rgg/exact_oracles.hpp"
#include "rgg/geometry.hpp"
#include "rgg/graph.hpp"
#include "rgg/spanning_tree.hpp"

namespace rgg {

/// Parameters of the construction. The dissection runs at r = r_ratio * rho.
struct BuilderConstants {
  std::size_t K = 100;
  double eta = 0.05;
  double r_ratio = 1.0;
  double escort_radius_factor = 6.0;
  std::size_t sector_count = 6;
  std::size_t tree_degree_bound = 26;
  // Per-cell consumption before the clean-up step: connector traversal,
  // arrivals beyond the current vertex, and the clean-up anchors.
  std::size_t r1_budget = 3;
  std::size_t r2_budget = 25;
  std::size_t r3_reserve = 7;
  AuditConstants audit = AuditConstants::paper();
  bool audit_first = true;
  /// The 2-connectivity precheck is skipped when G(V, rho) would exceed this many edges.
  double precheck_edge_limit = 5e6;

  static BuilderConstants paper(const NormSpec& norm) {
    BuilderConstants c;
    c.sector_count = rgg::sector_count(norm);
    c.tree_degree_bound = rgg::tree_degree_bound(norm);
    c.r2_budget = c.tree_degree_bound - 1;
    c.r3_reserve = c.sector_count + 1;
    return c;
  }

  /// Smallest sound threshold, coarser grid and the desk audit constants.
  static BuilderConstants desk(const NormSpec& norm) {
    BuilderConstants c = paper(norm);
    c.K = c.r1_budget + c.r2_budget + c.r3_reserve;
    c.eta = 0.1;
    c.audit = AuditConstants::desk();
    return c;
  }

  void validate(const NormSpec& norm) const {
    require(K >= r1_budget + r2_budget + r3_reserve, "BuilderConstants: K below r1 + r2 + r3 budget");
    require(tree_degree_bound >= 1 + r2_budget, "BuilderConstants: tree_degree_bound below 1 + r2_budget");
    require(r1_budget >= 3, "BuilderConstants: connector traversal needs r1_budget >= 3");
    require(sector_count == rgg::sector_count(norm), "BuilderConstants: sector_count does not match the norm");
    require(tree_degree_bound >= rgg::tree_degree_bound(norm), "BuilderConstants: tree_degree_bound below the lemma");
    require(r3_reserve >= sector_count + 1, "BuilderConstants: r3_reserve below sector_count + 1");
    require(eta > 0.0 && eta * norm.diameter_factor() < 1.0, "BuilderConstants: eta out of range");
    require(r_ratio >= 0.5 && r_ratio <= 1.0, "BuilderConstants: r_ratio must lie in [0.5, 1]");
    require(escort_radius_factor > 0.0, "BuilderConstants: escort_radius_factor must be positive");
  }
};

struct BuildFailure {
  std::string stage;     // precondition, audit, structure, escort, connector, labels, tree, emit, verify
  std::string property;  // e.g. 2-connected, P5, budget
  std::string witness;
};

struct BuildStats {
  bool precheck_ran = false;
  std::size_t giant_cells = 0;
  std::size_t small_components = 0;
  std::size_t escort_vertices = 0;
  std::size_t labeled = 0;
  std::size_t tree_max_degree = 0;
  std::size_t walk_steps = 0;
  std::size_t r1_steps = 0;
  std::size_t r2_steps = 0;
  std::size_t r3_steps = 0;
  std::size_t max_consumed_before_cleanup = 0;
  std::size_t min_available_at_cleanup = std::numeric_limits<std::size_t>::max();
};

/// Two escort paths from the giant to one small component and the grid path
/// in D joining their giant endpoints.
struct EscortBundle {
  std::size_t component = 0;     // index into BuildPlan::smalls
  std::vector<VertexId> first;   // a_1 ... b_1
  std::vector<VertexId> second;  // a_2 ... b_2
  GridId p1 = 0, p2 = 0;
  std::vector<GridId> connector;  // p1 ... p2

  VertexId a1() const { return first.front(); }
  VertexId a2() const { return second.front(); }
  VertexId b1() const { return first.back(); }
  VertexId b2() const { return second.back(); }
};

struct SmallComponent {
  bool bad = false;           // component of B rather than of D
  std::size_t component = 0;  // index into d_components or b_components
  std::vector<GridId> cells;
  std::vector<VertexId> vertices;  // ascending
};

struct BuildResult {
  bool ok = false;
  std::vector<VertexId> cycle;
  std::optional<BuildFailure> failure;
  BuildStats stats;
  std::vector<EscortBundle> bundles;
};

struct CycleCheck {
  bool ok = false;
  std::string message;
  std::optional<VertexId> duplicate;
  std::optional<std::pair<VertexId, VertexId>> long_edge;
  double edge_length = std::numeric_limits<double>::quiet_NaN();

  explicit operator bool() const noexcept { return ok; }
};

namespace detail {

// With `length` unset the cycle must cover every non-omitted vertex;
// otherwise it must have exactly `length` distinct vertices.
inline CycleCheck check_cycle(const PointSet& points, const NormSpec& norm, double rho,
                              std::span<const VertexId> cycle, std::span<const char> omitted,
                              std::optional<std::size_t> length) {
  CycleCheck c;
  const std::size_t n = points.size();
  if (cycle.size() < 3) {
    c.message = "cycle has fewer than three vertices";
    return c;
  }
  std::vector<char> seen(n, 0);
  for (VertexId v : cycle) {
    if (v >= n) {
      c.message = "vertex " + std::to_string(v) + " out of range";
      return c;
    }
    if (!omitted.empty() && omitted[v]) {
      c.message = "vertex " + std::to_string(v) + " should have been omitted";
      return c;
    }
    if (seen[v]) {
      c.duplicate = v;
      c.message = "duplicate vertex " + std::to_string(v);
      return c;
    }
    seen[v] = 1;
  }
  if (length) {
    if (cycle.size() != *length) {
      c.message = "cycle has " + std::to_string(cycle.size()) + " vertices, expected " + std::to_string(*length);
      return c;
    }
  } else {
    for (VertexId v = 0; v < n; ++v)
      if (!seen[v] && (omitted.empty() || !omitted[v])) {
        c.message = "missing vertex " + std::to_string(v);
        return c;
      }
  }
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const VertexId u = cycle[k], w = cycle[(k + 1) % cycle.size()];
    const double len = norm.distance(points[u], points[w]);
    if (len > rho) {
      c.long_edge = {u, w};
      c.edge_length = len;
      c.message = "edge " + std::to_string(u) + "-" + std::to_string(w) + " has length " + fmt_num(len) +
                  " > " + fmt_num(rho);
      return c;
    }
  }
  c.ok = true;
  return c;
}

inline double unit_ball_volume(const NormSpec& norm) {
  const double d = norm.d();
  if (norm.is_infinite()) return std::pow(2.0, d);
  const double p = norm.p();
  return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), d) / std::tgamma(1.0 + d / p);
}

}  // namespace detail

/// Whether `cycle` is a cyclic order of all n vertices with every step <= rho.
inline CycleCheck verify_cycle(const PointSet& points, const NormSpec& norm, double rho,
                               std::span<const VertexId> cycle) {
  return detail::check_cycle(points, norm, rho, cycle, {}, std::nullopt);
}

/// Same, for a cycle through exactly the vertices not flagged in `omitted`.
inline CycleCheck verify_cycle_on(const PointSet& points, const NormSpec& norm, double rho,
                                  std::span<const VertexId> cycle, std::span<const char> omitted) {
  return detail::check_cycle(points, norm, rho, cycle, omitted, std::nullopt);
}

/// Same, for a cycle of exactly `length` distinct vertices.
inline CycleCheck verify_cycle_length(const PointSet& points, const NormSpec& norm, double rho,
                                      std::span<const VertexId> cycle, std::size_t length) {
  return detail::check_cycle(points, norm, rho, cycle, {}, length);
}

/// Removes chords: repeatedly shortcuts x_i ... x_j whenever x_i, x_j are
/// within rho and j > i + 1. Endpoints are kept.
inline std::vector<VertexId> shortcut_path(const PointSet& points, const NormSpec& norm, double rho,
                                           std::vector<VertexId> path) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 2 < path.size() && !changed; ++i)
      for (std::size_t j = path.size() - 1; j > i + 1; --j)
        if (norm.distance(points[path[i]], points[path[j]]) <= rho) {
          path.erase(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, path.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
  }
  return path;
}

enum class Role : std::uint8_t { Unassigned, Giant, Small, Escort, Labeled };

/// Everything the rules need, computed once: dissection, structures,
/// small components, escort bundles, labels, spanning tree and walk.
class BuildPlan {
 public:
  BuildPlan(const PointSet& points, const NormSpec& norm, double rho, const BuilderConstants& consts)
      : points_(&points), norm_(norm), rho_(rho), consts_(consts) {
    require(points.dim() == static_cast<std::size_t>(norm.d()), "build_hamilton_cycle: dimension mismatch");
    require(points.size() >= 3, "build_hamilton_cycle: need at least three points");
    require(rho > 0.0 && std::isfinite(rho), "build_hamilton_cycle: rho must be positive");
    require(points.in_unit_cube(), "build_hamilton_cycle: points must lie in [0,1]^d");
    consts.validate(norm);
  }

  /// Runs every planning stage; nullopt on success.
  std::optional<BuildFailure> prepare(BuildStats& stats);

  const PointSet& points() const noexcept { return *points_; }
  const NormSpec& norm() const noexcept { return norm_; }
  double rho() const noexcept { return rho_; }
  const BuilderConstants& constants() const noexcept { return consts_; }
  const Dissection& dissection() const { return *diss_; }
  const StructureGraphs& structures() const noexcept { return sg_; }

  const std::vector<SmallComponent>& smalls() const noexcept { return smalls_; }
  const std::vector<EscortBundle>& bundles() const noexcept { return bundles_; }
  Role role(VertexId v) const noexcept { return role_[v]; }
  /// Small component, bundle or label grid point, depending on the role.
  std::uint32_t owner(VertexId v) const noexcept { return owner_[v]; }
  std::uint8_t label_part(VertexId v) const noexcept { return part_[v]; }

  /// Vertices labeled with q, ordered by part and then index.
  std::span<const VertexId> labels_of(GridId q) const {
    auto it = label_range_.find(q);
    if (it == label_range_.end()) return {};
    return {labels_.data() + it->second.first, it->second.second - it->second.first};
  }

  const std::vector<GridId>& tree_cells() const noexcept { return tree_cells_; }
  const SpanningTreePlan& tree() const noexcept { return tree_; }
  const std::vector<GridId>& walk() const noexcept { return walk_; }
  std::int32_t connector_of(GridId p) const noexcept { return connector_of_[p]; }
  std::int32_t connector_pos(GridId p) const noexcept { return connector_pos_[p]; }

  /// Walk over the tree cells, as grid points.
  std::vector<GridId> walk_of(const SpanningTreePlan& t) const {
    std::vector<GridId> w;
    for (VertexId k : double_traversal_walk(t, 0).nodes) w.push_back(tree_cells_[k]);
    return w;
  }

 private:
  std::optional<BuildFailure> precheck(BuildStats& stats) const;
  std::optional<BuildFailure> find_smalls();
  std::optional<BuildFailure> find_escorts();
  std::optional<BuildFailure> assign_labels();
  std::optional<BuildFailure> plan_tree();

  const PointSet* points_;
  NormSpec norm_;
  double rho_;
  BuilderConstants consts_;
  std::optional<Dissection> diss_;
  StructureGraphs sg_;
  std::vector<SmallComponent> smalls_;
  std::vector<EscortBundle> bundles_;
  std::vector<Role> role_;
  std::vector<std::uint32_t> owner_;
  std::vector<std::uint8_t> part_;
  std::vector<VertexId> labels_;
  std::unordered_map<GridId, std::pair<std::size_t, std::size_t>> label_range_;
  std::vector<GridId> tree_cells_;
  SpanningTreePlan tree_;
  std::vector<GridId> walk_;
  std::vector<std::int32_t> connector_of_, connector_pos_;
};

inline std::optional<BuildFailure> BuildPlan::precheck(BuildStats& stats) const {
  const double n = static_cast<double>(points_->size());
  const double vol = std::min(1.0, detail::unit_ball_volume(norm_) * std::pow(rho_, norm_.d()));
  if (n * (n - 1) / 2 * vol > consts_.precheck_edge_limit) return std::nullopt;
  stats.precheck_ran = true;
  const auto g = graph_at_radius(*points_, norm_, rho_);
  if (!is_connected(g)) return BuildFailure{"precondition", "2-connected", "G(V, rho) is disconnected"};
  if (auto cut = find_cut_vertex(g))
    return BuildFailure{"precondition", "2-connected", "cut vertex " + std::to_string(*cut)};
  return std::nullopt;
}

inline std::optional<BuildFailure> BuildPlan::find_smalls() {
  const auto& diss = *diss_;
  const std::size_t giant = *sg_.giant;
  auto add = [&](bool bad, std::size_t id, const GridComponent& comp) {
    SmallComponent s{bad, id, comp.nodes, {}};
    for (GridId p : comp.nodes) {
      auto m = diss.members(p);
      s.vertices.insert(s.vertices.end(), m.begin(), m.end());
    }
    std::sort(s.vertices.begin(), s.vertices.end());
    if (!s.vertices.empty()) smalls_.push_back(std::move(s));
  };
  for (std::size_t c = 0; c < sg_.d_components.size(); ++c)
    if (c != giant) add(false, c, sg_.d_components[c]);
  for (std::size_t c = 0; c < sg_.b_components.size(); ++c) {
    if (detail::diameter_at_least(diss, sg_.b_components[c], diss.r_prime()))
      return BuildFailure{"structure", "P4",
                          "bad component " + std::to_string(c) + " has diameter >= r' (" +
                              detail::fmt_num(sg_.b_components[c].diameter.lo) + ")"};
    add(true, c, sg_.b_components[c]);
  }
  const std::size_t n = points_->size();
  role_.assign(n, Role::Unassigned);
  owner_.assign(n, 0);
  for (GridId p : sg_.d_components[giant].nodes)
    for (VertexId v : diss.members(p)) role_[v] = Role::Giant;
  for (std::size_t i = 0; i < smalls_.size(); ++i)
    for (VertexId v : smalls_[i].vertices) {
      role_[v] = Role::Small;
      owner_[v] = static_cast<std::uint32_t>(i);
    }
  return std::nullopt;
}

inline std::optional<BuildFailure> BuildPlan::find_escorts() {
  const auto& diss = *diss_;
  const auto& pts = *points_;
  const std::size_t n = pts.size();
  connector_of_.assign(diss.grid_count(), -1);
  connector_pos_.assign(diss.grid_count(), -1);
  if (smalls_.empty()) return std::nullopt;

  const GridIndex rho_index(pts, rho_);
  std::vector<char> blocked(diss.grid_count(), 0);
  std::vector<char> reserved(n, 0);
  std::vector<std::uint32_t> local_of(n, std::numeric_limits<std::uint32_t>::max());
  const double whole = norm_.diameter_factor() + diss.r();

  for (std::size_t i = 0; i < smalls_.size(); ++i) {
    const auto& comp = smalls_[i];
    const GridId centre = comp.cells.front();
    double radius = consts_.escort_radius_factor * diss.r() + diss.r_prime();
    std::optional<PathPair> found;
    std::vector<VertexId> local;
    while (true) {
      local.clear();
      diss.for_each_within(centre, radius, [&](GridId p) {
        for (VertexId v : diss.members(p))
          if (role_[v] == Role::Unassigned) local.push_back(v);
      });
      const std::size_t interior_count = local.size();
      local.insert(local.end(), comp.vertices.begin(), comp.vertices.end());
      const std::size_t inner = local.size();
      // Each interior or B vertex keeps its two nearest eligible giant vertices.
      for (std::size_t k = 0; k < inner; ++k) {
        std::pair<double, VertexId> best[2] = {{INFINITY, 0}, {INFINITY, 0}};
        rho_index.for_each_within(pts[local[k]], rho_, norm_, local[k], [&](VertexId a, double dist) {
          if (role_[a] != Role::Giant || reserved[a] || blocked[diss.cell_of_vertex(a)]) return;
          const std::pair<double, VertexId> cand{dist, a};
          if (cand < best[0]) {
            best[1] = best[0];
            best[0] = cand;
          } else if (cand < best[1]) {
            best[1] = cand;
          }
        });
        for (const auto& b : best)
          if (std::isfinite(b.first) && local_of[b.second] == std::numeric_limits<std::uint32_t>::max()) {
            local_of[b.second] = 0;  // marked; renumbered below
            local.push_back(b.second);
          }
      }
      for (std::size_t k = 0; k < local.size(); ++k) local_of[local[k]] = static_cast<std::uint32_t>(k);

      PointSet sub(pts.dim());
      for (VertexId v : local) sub.push_back(pts.point(v));
      GeometricGraph g(local.size(), rho_);
      const GridIndex sub_index(sub, rho_);
      for (std::size_t k = 0; k < inner; ++k)
        sub_index.for_each_within(sub[k], rho_, norm_, k, [&](VertexId w, double) {
          if (w > k && w < inner) g.add_edge(static_cast<VertexId>(k), w);
        });
      std::vector<VertexId> A, B;
      for (std::size_t k = inner; k < local.size(); ++k) A.push_back(static_cast<VertexId>(k));
      for (std::size_t k = interior_count; k < inner; ++k) B.push_back(static_cast<VertexId>(k));
      for (std::size_t k = 0; k < inner; ++k)
        for (VertexId a : A)
          if (norm_.distance(sub[k], sub[a]) <= rho_) g.add_edge(static_cast<VertexId>(k), a);
      g.finalize();
      for (VertexId v : local) local_of[v] = std::numeric_limits<std::uint32_t>::max();
      if (!A.empty()) {
        try {
          found = two_disjoint_paths(g, A, B, B.size() == 1 ? EndpointMode::ShareEndpoint : EndpointMode::Disjoint);
        } catch (const InfeasibleError&) {
        }
      }
      if (found || radius > whole) break;
      radius *= 2.0;
    }
    if (!found)
      return BuildFailure{"escort", "2-connected",
                          "no two disjoint escort paths for small component " + std::to_string(i) + " at grid point " +
                              std::to_string(centre)};

    EscortBundle bundle;
    bundle.component = i;
    auto globalise = [&](const std::vector<VertexId>& path) {
      std::vector<VertexId> out;
      for (VertexId k : path) out.push_back(local[k]);
      return shortcut_path(pts, norm_, rho_, std::move(out));
    };
    bundle.first = globalise(found->first);
    bundle.second = globalise(found->second);
    bundle.p1 = diss.cell_of_vertex(bundle.a1());
    bundle.p2 = diss.cell_of_vertex(bundle.a2());
    auto conn = dense_path_within(sg_, diss, bundle.p1, bundle.p2, bundle.p1, consts_.audit.locality * diss.r(),
                                  blocked);
    if (!conn)
      return BuildFailure{"connector", "P5",
                          "no D-path from " + std::to_string(bundle.p1) + " to " + std::to_string(bundle.p2) +
                              " inside B(p1, " + detail::fmt_num(consts_.audit.locality) + "r) avoiding earlier connectors"};
    bundle.connector = std::move(*conn);
    for (std::size_t k = 0; k < bundle.connector.size(); ++k) {
      const GridId c = bundle.connector[k];
      blocked[c] = 1;
      connector_of_[c] = static_cast<std::int32_t>(i);
      connector_pos_[c] = static_cast<std::int32_t>(k);
    }
    reserved[bundle.a1()] = reserved[bundle.a2()] = 1;
    for (const auto* path : {&bundle.first, &bundle.second})
      for (std::size_t k = 1; k + 1 < path->size(); ++k) {
        role_[(*path)[k]] = Role::Escort;
        owner_[(*path)[k]] = static_cast<std::uint32_t>(i);
      }
    bundles_.push_back(std::move(bundle));
  }
  return std::nullopt;
}

inline std::optional<BuildFailure> BuildPlan::assign_labels() {
  const auto& diss = *diss_;
  const auto& pts = *points_;
  part_.assign(pts.size(), 0);
  std::unordered_map<GridId, GridId> target;
  std::unordered_map<GridId, SectorPartition> partitions;
  std::vector<std::tuple<GridId, std::uint8_t, VertexId>> keyed;
  for (VertexId v = 0; v < pts.size(); ++v) {
    if (role_[v] != Role::Unassigned) continue;
    const GridId p = diss.cell_of_vertex(v);
    auto it = target.find(p);
    if (it == target.end()) {
      std::optional<std::pair<double, GridId>> best;
      diss.for_each_within(p, diss.r_prime(), [&](GridId q) {
        if (!sg_.dense[q]) return;
        const std::pair<double, GridId> cand{diss.grid_distance(p, q), q};
        if (!best || cand < *best) best = cand;
      });
      if (!best)
        return BuildFailure{"labels", "P3", "vertex " + std::to_string(v) + " has no dense grid point within r'"};
      it = target.emplace(p, best->second).first;
    }
    const GridId q = it->second;
    auto pit = partitions.find(q);
    if (pit == partitions.end())
      pit = partitions.emplace(q, SectorPartition(diss.grid_point(q), diss.r(), norm_)).first;
    const auto part = pit->second.part_of(pts[v]);
    if (!part)
      return BuildFailure{"labels", "label-distance", "vertex " + std::to_string(v) + " lies outside B(q, r)"};
    role_[v] = Role::Labeled;
    owner_[v] = q;
    part_[v] = static_cast<std::uint8_t>(std::min<std::size_t>(*part, 255));
    keyed.emplace_back(q, part_[v], v);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t k = 0; k < keyed.size();) {
    const GridId q = std::get<0>(keyed[k]);
    const std::size_t start = k;
    while (k < keyed.size() && std::get<0>(keyed[k]) == q) labels_.push_back(std::get<2>(keyed[k++]));
    label_range_[q] = {start, k};
  }
  return std::nullopt;
}

inline std::optional<BuildFailure> BuildPlan::plan_tree() {
  const auto& diss = *diss_;
  tree_cells_ = sg_.d_components[*sg_.giant].nodes;
  std::unordered_map<GridId, VertexId> local;
  PointSet coords(diss.dim());
  for (std::size_t k = 0; k < tree_cells_.size(); ++k) {
    local.emplace(tree_cells_[k], static_cast<VertexId>(k));
    coords.push_back(diss.grid_point(tree_cells_[k]));
  }
  GeometricGraph h(tree_cells_.size(), diss.r_prime());
  for (std::size_t k = 0; k < tree_cells_.size(); ++k)
    diss.for_each_h_neighbor(tree_cells_[k], [&](GridId q) {
      auto it = local.find(q);
      if (it != local.end() && it->second > k) h.add_edge(static_cast<VertexId>(k), it->second);
    });
  h.finalize();
  tree_ = bounded_degree_spanning_tree(h, coords, norm_, diss.r_prime());
  if (tree_.max_degree() > consts_.tree_degree_bound)
    return BuildFailure{"tree", "degree",
                        "spanning tree degree " + std::to_string(tree_.max_degree()) + " exceeds " +
                            std::to_string(consts_.tree_degree_bound)};
  walk_ = walk_of(tree_);
  return std::nullopt;
}

inline std::optional<BuildFailure> BuildPlan::prepare(BuildStats& stats) {
  if (auto f = precheck(stats)) return f;
  diss_.emplace(*points_, norm_, consts_.eta, consts_.r_ratio * rho_, consts_.K);
  sg_ = classify_and_extract(*diss_);
  if (consts_.audit_first) {
    const auto audit = audit_properties(sg_, *diss_, consts_.audit);
    if (auto p = audit.first_failure())
      return BuildFailure{"audit", property_name(*p), audit[*p].witness.summary};
  }
  if (!sg_.giant)
    return BuildFailure{"structure", "P6",
                        std::to_string(sg_.large_count()) + " components of D have diameter >= r'"};
  if (auto f = find_smalls()) return f;
  if (auto f = find_escorts()) return f;
  if (auto f = assign_labels()) return f;
  if (auto f = plan_tree()) return f;
  stats.giant_cells = tree_cells_.size();
  stats.small_components = smalls_.size();
  stats.labeled = labels_.size();
  stats.escort_vertices = static_cast<std::size_t>(std::count(role_.begin(), role_.end(), Role::Escort));
  stats.tree_max_degree = tree_.max_degree();
  stats.walk_steps = walk_.empty() ? 0 : walk_.size() - 1;
  return std::nullopt;
}

/// Which vertices and bundles an emission leaves out, and the walk to follow.
struct EmitState {
  std::vector<char> omitted;         // per vertex; empty = none
  std::vector<char> bundle_removed;  // per bundle; empty = none
  const std::vector<GridId>* walk = nullptr;  // null = the plan's walk
};

struct EmitResult {
  std::vector<VertexId> cycle;
  std::optional<BuildFailure> failure;
};

namespace detail {

// Applies Rules R1-R3 along a closed walk. Fresh picks take the lowest-index
// usable vertex of a cell.
class Emitter {
 public:
  Emitter(const BuildPlan& plan, const EmitState& st, BuildStats* stats)
      : plan_(plan), st_(st), stats_(stats), diss_(plan.dissection()),
        walk_(st.walk ? *st.walk : plan.walk()) {
    const std::size_t n = plan.points().size();
    visited_.assign(n, 0);
    reserved_.assign(n, 0);
    for (std::size_t i = 0; i < plan.bundles().size(); ++i)
      if (bundle_active(i)) reserved_[plan.bundles()[i].a1()] = reserved_[plan.bundles()[i].a2()] = 1;
  }

  EmitResult run() {
    EmitResult res;
    if (walk_.empty()) return fail("emit", "walk", "empty walk");
    const std::size_t N = walk_.size() - 1;
    std::unordered_map<GridId, std::size_t> first, last;
    for (std::size_t t = 0; t <= N; ++t) {
      first.try_emplace(walk_[t], t);
      last[walk_[t]] = t;
    }
    out_.reserve(plan_.points().size());
    auto start = pick(walk_[0]);
    if (!start) return fail("emit", "budget", "root cell " + std::to_string(walk_[0]) + " is empty");
    visit(*start);
    std::vector<char> done(plan_.bundles().size(), 0);
    for (std::size_t t = 0; t <= N; ++t) {
      const GridId q = walk_[t];
      const std::int32_t b = plan_.connector_of(q);
      if (t == first[q] && b >= 0 && bundle_active(static_cast<std::size_t>(b)) && !done[b]) {
        done[b] = 1;
        if (stats_) ++stats_->r1_steps;
        if (auto f = route(static_cast<std::size_t>(b), static_cast<std::size_t>(plan_.connector_pos(q))))
          return {{}, f};
      }
      if (t != last[q]) {
        if (stats_) ++stats_->r2_steps;
        if (!step_to(walk_[t + 1], t)) return fail("emit", "budget", exhausted(walk_[t + 1], t));
        continue;
      }
      if (stats_) {
        ++stats_->r3_steps;
        stats_->max_consumed_before_cleanup = std::max(stats_->max_consumed_before_cleanup, consumed_[q]);
        std::size_t available = 1;
        for (VertexId v : diss_.members(q)) available += usable(v);
        stats_->min_available_at_cleanup = std::min(stats_->min_available_at_cleanup, available);
      }
      if (!cleanup(q, std::nullopt)) return fail("emit", "budget", exhausted(q, t));
      for (VertexId v : diss_.members(q))
        if (!visited_[v] && !omitted(v)) visit(v);
      if (t < N && !step_to(walk_[t + 1], t)) return fail("emit", "budget", exhausted(walk_[t + 1], t));
    }
    std::size_t expected = plan_.points().size();
    if (!st_.omitted.empty()) expected -= static_cast<std::size_t>(std::count(st_.omitted.begin(), st_.omitted.end(), 1));
    if (out_.size() != expected)
      return fail("emit", "coverage",
                  "visited " + std::to_string(out_.size()) + " of " + std::to_string(expected) + " vertices");
    res.cycle = std::move(out_);
    return res;
  }

 private:
  bool omitted(VertexId v) const { return !st_.omitted.empty() && st_.omitted[v]; }
  bool usable(VertexId v) const { return !visited_[v] && !reserved_[v] && !omitted(v); }
  bool bundle_active(std::size_t i) const { return st_.bundle_removed.empty() || !st_.bundle_removed[i]; }

  EmitResult fail(std::string stage, std::string property, std::string witness) const {
    return {{}, BuildFailure{std::move(stage), std::move(property), std::move(witness)}};
  }
  static std::string exhausted(GridId q, std::size_t t) {
    return "cell " + std::to_string(q) + " has no unvisited vertex left at walk step " + std::to_string(t);
  }

  void visit(VertexId v) {
    visited_[v] = 1;
    out_.push_back(v);
    ++consumed_[diss_.cell_of_vertex(v)];
  }

  std::optional<VertexId> pick(GridId q, VertexId skip = static_cast<VertexId>(-1)) {
    for (VertexId v : diss_.members(q))
      if (usable(v) && v != skip) return v;
    return std::nullopt;
  }

  bool step_to(GridId q, std::size_t) {
    auto w = pick(q);
    if (!w) return false;
    visit(*w);
    return true;
  }

  // Clean-up path through the non-omitted labels of q. The current vertex is
  // the first anchor unless `skip` is set (small components), in which case
  // every anchor is fresh and `skip` is never used as one.
  bool cleanup(GridId q, std::optional<VertexId> skip) {
    const auto labels = plan_.labels_of(q);
    std::size_t k = 0;
    int prev = -1;
    for (VertexId v : labels) {
      if (omitted(v)) continue;
      if (plan_.label_part(v) != prev) {
        ++k;
        prev = plan_.label_part(v);
      }
    }
    if (k == 0) return true;
    const VertexId none = static_cast<VertexId>(-1);
    if (skip) {
      auto a = pick(q, *skip);
      if (!a) return false;
      visit(*a);
    }
    prev = -1;
    bool open = false;
    for (VertexId v : labels) {
      if (omitted(v)) continue;
      if (open && plan_.label_part(v) != prev) {
        auto a = pick(q, skip.value_or(none));
        if (!a) return false;
        visit(*a);
      }
      prev = plan_.label_part(v);
      open = true;
      visit(v);
    }
    auto a = pick(q, skip.value_or(none));
    if (!a) return false;
    visit(*a);
    return true;
  }

  // Claim-4 path for bundle i, entered at connector position j.
  std::optional<BuildFailure> route(std::size_t i, std::size_t j) {
    const auto& b = plan_.bundles()[i];
    const auto& conn = b.connector;
    const std::size_t N = conn.size();
    auto need = [&](GridId c) -> std::optional<BuildFailure> {
      auto w = pick(c);
      if (!w) return BuildFailure{"emit", "budget", "connector cell " + std::to_string(c) + " exhausted"};
      visit(*w);
      return std::nullopt;
    };
    for (std::size_t k = j; k-- > 1;)
      if (auto f = need(conn[k])) return f;
    for (VertexId v : b.first) visit(v);
    const auto& comp = plan_.smalls()[b.component];
    if (b.b1() != b.b2()) {
      reserved_[b.b2()] = 1;
      for (GridId c : comp.cells)
        if (!cleanup(c, b.b2()))
          return BuildFailure{"emit", "budget", "small component cell " + std::to_string(c) + " exhausted"};
      for (VertexId v : comp.vertices)
        if (!visited_[v] && !omitted(v) && v != b.b2()) visit(v);
      reserved_[b.b2()] = 0;
      visit(b.b2());
    }
    for (std::size_t k = b.second.size() - 1; k-- > 0;) visit(b.second[k]);
    for (std::size_t k = N - 1; k-- > j + 1;)
      if (auto f = need(conn[k])) return f;
    return need(conn[j]);
  }

  const BuildPlan& plan_;
  const EmitState& st_;
  BuildStats* stats_;
  const Dissection& diss_;
  const std::vector<GridId>& walk_;
  std::vector<char> visited_, reserved_;
  std::unordered_map<GridId, std::size_t> consumed_;
  std::vector<VertexId> out_;
};

}  // namespace detail

/// Applies Rules R1-R3 to a prepared plan.
inline EmitResult emit_cycle(const BuildPlan& plan, const EmitState& state = {}, BuildStats* stats = nullptr) {
  return detail::Emitter(plan, state, stats).run();
}

/// Constructive Hamilton cycle of G(points, rho). Failures are returned as
/// values naming the stage and the violated requirement.
inline BuildResult build_hamilton_cycle(const PointSet& points, const NormSpec& norm, double rho,
                                        const BuilderConstants& consts) {
  BuildResult res;
  BuildPlan plan(points, norm, rho, consts);
  if (auto f = plan.prepare(res.stats)) {
    res.failure = f;
    res.bundles = plan.bundles();
    return res;
  }
  res.bundles = plan.bundles();
  auto em = emit_cycle(plan, {}, &res.stats);
  if (em.failure) {
    res.failure = em.failure;
    return res;
  }
  const auto check = verify_cycle(points, norm, rho, em.cycle);
  if (!check) {
    res.failure = BuildFailure{"verify", "cycle", check.message};
    return res;
  }
  res.ok = true;
  res.cycle = std::move(em.cycle);
  return res;
}

/// Checks one bundle: path adjacency at rho, endpoints in the giant and in
/// the small component, interiors outside every V_C, disjointness of the
/// two paths (sharing only b when |V_C| = 1), and the connector.
inline CycleCheck validate_bundle(const BuildPlan& plan, const EscortBundle& b) {
  CycleCheck c;
  const auto& pts = plan.points();
  const auto& diss = plan.dissection();
  const auto& comp = plan.smalls().at(b.component);
  auto fail = [&](std::string msg) {
    c.message = std::move(msg);
    return c;
  };
  for (const auto* path : {&b.first, &b.second}) {
    if (path->empty()) return fail("empty escort path");
    for (std::size_t k = 0; k + 1 < path->size(); ++k)
      if (plan.norm().distance(pts[(*path)[k]], pts[(*path)[k + 1]]) > plan.rho())
        return fail("escort path edge longer than rho");
    if (plan.role(path->front()) != Role::Giant) return fail("escort path does not start in the giant");
    if (!std::binary_search(comp.vertices.begin(), comp.vertices.end(), path->back()))
      return fail("escort path does not end in its small component");
    for (std::size_t k = 1; k + 1 < path->size(); ++k) {
      const Role r = plan.role((*path)[k]);
      if (r == Role::Giant || r == Role::Small) return fail("escort path interior meets a component");
    }
  }
  std::set<VertexId> a(b.first.begin(), b.first.end());
  for (VertexId v : b.second)
    if (a.count(v) && !(v == b.b1() && v == b.b2() && comp.vertices.size() == 1))
      return fail("escort paths share vertex " + std::to_string(v));
  if (b.connector.empty() || b.connector.front() != b.p1 || b.connector.back() != b.p2)
    return fail("connector does not join the anchors");
  if (diss.cell_of_vertex(b.a1()) != b.p1 || diss.cell_of_vertex(b.a2()) != b.p2)
    return fail("anchor grid points do not hold a_1, a_2");
  const auto giant = static_cast<std::int32_t>(*plan.structures().giant);
  for (std::size_t k = 0; k < b.connector.size(); ++k) {
    if (plan.structures().d_label[b.connector[k]] != giant) return fail("connector leaves the giant");
    if (k > 0 && diss.grid_distance(b.connector[k - 1], b.connector[k]) > diss.r_prime())
      return fail("connector step longer than r'");
  }
  c.ok = true;
  return c;
}

/// Bundles for different components share no path vertex and no connector cell.
inline CycleCheck bundles_disjoint(std::span<const EscortBundle> bundles) {
  CycleCheck c;
  std::unordered_map<VertexId, std::size_t> owner;
  std::unordered_map<GridId, std::size_t> cell_owner;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    std::set<VertexId> mine(bundles[i].first.begin(), bundles[i].first.end());
    mine.insert(bundles[i].second.begin(), bundles[i].second.end());
    for (VertexId v : mine)
      if (auto [it, fresh] = owner.emplace(v, i); !fresh) {
        c.message = "bundles " + std::to_string(it->second) + " and " + std::to_string(i) + " share vertex " +
                    std::to_string(v);
        return c;
      }
    for (GridId p : bundles[i].connector)
      if (auto [it, fresh] = cell_owner.emplace(p, i); !fresh) {
        c.message = "connectors " + std::to_string(it->second) + " and " + std::to_string(i) + " share grid point " +
                    std::to_string(p);
        return c;
      }
  }
  c.ok = true;
  return c;
}

/// Escort bundle of one small component, from a fresh plan.
inline std::optional<EscortBundle> escort_paths(const PointSet& points, const NormSpec& norm, double rho,
                                                const BuilderConstants& consts, std::size_t component,
                                                BuildFailure* failure = nullptr) {
  BuildStats stats;
  BuildPlan plan(points, norm, rho, consts);
  if (auto f = plan.prepare(stats)) {
    if (failure) *failure = *f;
    return std::nullopt;
  }
  for (const auto& b : plan.bundles())
    if (b.component == component) return b;
  if (failure) *failure = {"escort", "component", "no small component " + std::to_string(component)};
  return std::nullopt;
}

}  // namespace rgg
