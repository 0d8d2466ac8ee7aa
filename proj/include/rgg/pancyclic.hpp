#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "rgg/cycle_builder.hpp"
#include "rgg/exact_oracles.hpp"

namespace rgg {

using CycleVisitor = std::function<void(std::size_t length, std::span<const VertexId> cycle)>;

struct PancyclicReport {
  bool complete = false;
  std::size_t produced = 0;
  std::size_t from_builder = 0;
  std::size_t from_oracle = 0;
  std::size_t splices = 0;    // members obtained by splicing one vertex out
  std::size_t reemits = 0;    // members obtained by reapplying the rules
  std::optional<std::size_t> first_missing;
  std::optional<BuildFailure> failure;
};

namespace detail {

class FamilyRun {
 public:
  FamilyRun(const BuildPlan& plan, const CycleVisitor& visit, PancyclicReport& rep)
      : plan_(plan), visit_(visit), rep_(rep), n_(plan.points().size()) {
    state_.omitted.assign(n_, 0);
    state_.bundle_removed.assign(plan.bundles().size(), 0);
    tree_ = plan.tree();
    walk_ = plan.walk();
    state_.walk = &walk_;
  }

  /// Emits lengths n, n-1, ... down to 3, stopping at the first failure.
  /// Returns the smallest length produced.
  std::size_t run() {
    auto first = emit_cycle(plan_, state_);
    if (first.failure) {
      rep_.failure = first.failure;
      return n_ + 1;
    }
    cycle_ = std::move(first.cycle);
    if (!accept()) return n_ + 1;

    // Labels, in index order.
    for (VertexId v = 0; v < n_; ++v)
      if (plan_.role(v) == Role::Labeled && !drop(v)) return cycle_.size();

    // Small components with their escorts.
    for (std::size_t i = 0; i < plan_.bundles().size(); ++i)
      if (!drop_bundle(i)) return cycle_.size();

    // The giant, leaf cells of the tree first.
    return shrink_giant();
  }

 private:
  // Re-emitted cycles are verified in full. A spliced cycle is the verified
  // previous one minus a vertex whose neighbours were just checked adjacent,
  // which needs no further work.
  bool accept(bool full = true) {
    if (full) {
      const auto check = verify_cycle_on(plan_.points(), plan_.norm(), plan_.rho(), cycle_, state_.omitted);
      if (!check) {
        rep_.failure = BuildFailure{"verify", "cycle", check.message};
        return false;
      }
    }
    visit_(cycle_.size(), cycle_);
    ++rep_.produced;
    ++rep_.from_builder;
    return true;
  }

  // Omits v: splices it out when its two cycle neighbours are adjacent,
  // otherwise reapplies the rules to the reduced vertex set.
  bool drop(VertexId v) {
    state_.omitted[v] = 1;
    if (cycle_.size() > 3) {
      const auto it = std::find(cycle_.begin(), cycle_.end(), v);
      if (it != cycle_.end()) {
        const std::size_t k = static_cast<std::size_t>(it - cycle_.begin()), m = cycle_.size();
        const VertexId u = cycle_[(k + m - 1) % m], w = cycle_[(k + 1) % m];
        if (plan_.norm().distance(plan_.points()[u], plan_.points()[w]) <= plan_.rho()) {
          cycle_.erase(it);
          ++rep_.splices;
          return accept(false);
        }
      }
    }
    return reemit();
  }

  bool reemit() {
    auto res = emit_cycle(plan_, state_);
    if (res.failure) {
      rep_.failure = res.failure;
      return false;
    }
    cycle_ = std::move(res.cycle);
    ++rep_.reemits;
    return accept();
  }

  // V_C minus the escort endpoints one by one, then spare giant vertices to
  // cover the lengths the escort removal skips, then the whole bundle.
  bool drop_bundle(std::size_t i) {
    const auto& b = plan_.bundles()[i];
    const auto& comp = plan_.smalls()[b.component];
    for (VertexId v : comp.vertices)
      if (v != b.b1() && v != b.b2() && !state_.omitted[v] && !drop(v)) return false;
    std::set<VertexId> escort(b.first.begin() + 1, b.first.end());
    escort.insert(b.second.begin() + 1, b.second.end());
    const auto saved = cycle_;
    const auto spares = spare_giant_vertices(i, escort.size() - 1);
    if (spares.size() + 1 < escort.size()) {
      rep_.failure = BuildFailure{"pancyclic", "spares",
                                  "not enough spare giant vertices to bridge bundle " + std::to_string(i)};
      return false;
    }
    for (VertexId v : spares)
      if (!drop(v)) return false;
    for (VertexId v : spares) state_.omitted[v] = 0;
    cycle_ = saved;
    for (VertexId v : escort) state_.omitted[v] = 1;
    state_.bundle_removed[i] = 1;
    return reemit();
  }

  // Highest-index vertices of giant cells off every active connector,
  // keeping enough in each cell for its walk visits.
  std::vector<VertexId> spare_giant_vertices(std::size_t bundle, std::size_t want) const {
    std::vector<VertexId> out;
    const auto& diss = plan_.dissection();
    const auto& cells = plan_.tree_cells();
    for (std::size_t k = 0; k < cells.size() && out.size() < want; ++k) {
      const std::int32_t c = plan_.connector_of(cells[k]);
      if (c >= 0 && static_cast<std::size_t>(c) >= bundle) continue;
      const auto members = diss.members(cells[k]);
      const std::size_t keep = tree_.degree(static_cast<VertexId>(k)) + 2;
      std::size_t live = 0;
      for (VertexId v : members) live += !state_.omitted[v];
      for (std::size_t m = members.size(); m-- > 0 && live > keep && out.size() < want;) {
        if (state_.omitted[members[m]]) continue;
        out.push_back(members[m]);
        --live;
      }
    }
    return out;
  }

  std::size_t shrink_giant() {
    const auto& diss = plan_.dissection();
    const auto& cells = plan_.tree_cells();
    std::set<VertexId> leaves;
    for (VertexId k = 1; k < tree_.n; ++k)
      if (tree_.degree(k) == 1) leaves.insert(k);
    while (!leaves.empty()) {
      const VertexId leaf = *leaves.rbegin();
      const auto members = diss.members(cells[leaf]);
      std::vector<VertexId> live;
      for (VertexId v : members)
        if (!state_.omitted[v]) live.push_back(v);
      for (std::size_t m = live.size(); m-- > 1;)
        if (!drop(live[m])) return cycle_.size();
      // Last vertex of the cell: cut the leaf off the tree and walk again.
      leaves.erase(leaf);
      const VertexId parent = tree_.adj[leaf].front();
      tree_.adj[leaf].clear();
      auto& pa = tree_.adj[parent];
      pa.erase(std::find(pa.begin(), pa.end(), leaf));
      if (parent != 0 && pa.size() == 1) leaves.insert(parent);
      walk_ = plan_.walk_of(tree_);
      if (!live.empty() && !drop(live[0])) return cycle_.size();
    }
    const auto root = diss.members(cells[0]);
    for (std::size_t m = root.size(); m-- > 0 && cycle_.size() > 3;)
      if (!state_.omitted[root[m]] && !drop(root[m])) return cycle_.size();
    return cycle_.size();
  }

  const BuildPlan& plan_;
  const CycleVisitor& visit_;
  PancyclicReport& rep_;
  std::size_t n_;
  EmitState state_;
  SpanningTreePlan tree_;
  std::vector<GridId> walk_;
  std::vector<VertexId> cycle_;
};

}  // namespace detail

/// Cycles of every length from n down to 3 in G(points, rho), each verified
/// before it is passed to `visit`. Vertices are deleted in the order labels,
/// small components with their escorts, then giant cells from the leaves of
/// the spanning tree. Lengths the construction does not reach are filled by
/// the exact oracle when n <= kPancyclicCeiling.
inline PancyclicReport build_pancyclic_family(const PointSet& points, const NormSpec& norm, double rho,
                                              const BuilderConstants& consts, const CycleVisitor& visit) {
  const std::size_t n = points.size();
  require(n >= 3, "build_pancyclic_family: need at least three points");
  PancyclicReport rep;
  std::size_t reached = n + 1;  // smallest length produced by the construction
  {
    BuildStats stats;
    BuildPlan plan(points, norm, rho, consts);
    if (auto f = plan.prepare(stats)) rep.failure = f;
    else reached = detail::FamilyRun(plan, visit, rep).run();
  }
  if (reached <= 3) {
    rep.complete = true;
    return rep;
  }
  if (n > kPancyclicCeiling) {
    rep.first_missing = reached - 1;
    return rep;
  }
  const auto g = graph_at_radius(points, norm, rho);
  for (std::size_t len = std::min(reached - 1, n); len >= 3; --len) {
    auto c = find_cycle_of_length(g, len);
    if (!c || !verify_cycle_length(points, norm, rho, *c, len)) {
      rep.first_missing = len;
      return rep;
    }
    visit(len, *c);
    ++rep.produced;
    ++rep.from_oracle;
  }
  rep.complete = true;
  rep.failure.reset();
  return rep;
}

/// Collecting variant, for small inputs.
inline std::map<std::size_t, std::vector<VertexId>> pancyclic_family_map(const PointSet& points, const NormSpec& norm,
                                                                         double rho, const BuilderConstants& consts,
                                                                         PancyclicReport* report = nullptr) {
  std::map<std::size_t, std::vector<VertexId>> out;
  auto rep = build_pancyclic_family(points, norm, rho, consts, [&](std::size_t len, std::span<const VertexId> c) {
    out.emplace(len, std::vector<VertexId>(c.begin(), c.end()));
  });
  if (report) *report = rep;
  return out;
}

}  // namespace rgg
