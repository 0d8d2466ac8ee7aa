#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/rng.hpp"

namespace rgg {

using GridId = std::uint32_t;

/// The lattice P_{eta r} = [0,1]^d intersected with (eta r)Z^d, and the input
/// points bucketed into the half-open cells p + [0, eta r)^d. Grid ids are
/// row-major with the first coordinate slowest, so id order is lexicographic.
class Dissection {
 public:
  static constexpr std::size_t kMaxDim = 16;

  Dissection(const PointSet& points, const NormSpec& norm, double eta, double r, std::size_t K)
      : norm_(norm), eta_(eta), r_(r), K_(K) {
    require(points.empty() || points.dim() == static_cast<std::size_t>(norm.d()),
            "build_dissection: dimension mismatch");
    require(r > 0.0 && std::isfinite(r), "build_dissection: r must be positive");
    require(eta > 0.0 && eta * norm.diameter_factor() < 1.0, "build_dissection: eta must lie in (0, 1/d^{1/p})");
    require(K >= 1, "build_dissection: K must be at least 1");
    d_ = static_cast<std::size_t>(norm.d());
    require(d_ <= kMaxDim, "build_dissection: dimension too large");
    h_ = eta * r;
    r_prime_ = r * (1.0 - eta * norm.diameter_factor());
    per_axis_ = static_cast<std::size_t>(std::floor(1.0 / h_ + 1e-9)) + 1;
    require(std::pow(static_cast<double>(per_axis_), static_cast<double>(d_)) < 5e7,
            "build_dissection: grid too fine");
    count_ = 1;
    for (std::size_t j = 0; j < d_; ++j) count_ *= per_axis_;

    const std::size_t n = points.size();
    cell_of_vertex_.resize(n);
    std::vector<std::uint32_t> counts(count_ + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      require(in_unit_cube(points[i]), "build_dissection: points must lie in [0,1]^d");
      cell_of_vertex_[i] = cell_of(points[i]);
      ++counts[cell_of_vertex_[i] + 1];
    }
    for (std::size_t c = 0; c < count_; ++c) counts[c + 1] += counts[c];
    starts_ = counts;
    members_.resize(n);
    for (std::size_t i = 0; i < n; ++i) members_[counts[cell_of_vertex_[i]]++] = static_cast<VertexId>(i);

    // Lattice offsets delta != 0 with |delta| h <= r' (closed threshold of H).
    const auto m = static_cast<std::int64_t>(std::floor(r_prime_ / h_ + 1e-9));
    std::vector<std::int64_t> delta(d_, -m);
    while (true) {
      if (std::any_of(delta.begin(), delta.end(), [](std::int64_t x) { return x != 0; }) &&
          offset_length(delta) <= r_prime_) {
        offsets_.insert(offsets_.end(), delta.begin(), delta.end());
      }
      std::size_t j = d_;
      while (j > 0 && delta[j - 1] == m) delta[--j] = -m;
      if (j == 0) break;
      ++delta[j - 1];
    }
  }

  const NormSpec& norm() const noexcept { return norm_; }
  std::size_t dim() const noexcept { return d_; }
  double eta() const noexcept { return eta_; }
  double r() const noexcept { return r_; }
  double r_prime() const noexcept { return r_prime_; }
  double spacing() const noexcept { return h_; }
  std::size_t dense_threshold() const noexcept { return K_; }
  std::size_t per_axis() const noexcept { return per_axis_; }
  std::size_t grid_count() const noexcept { return count_; }
  std::size_t point_count() const noexcept { return members_.size(); }

  std::vector<std::int64_t> index_of(GridId id) const {
    std::vector<std::int64_t> idx(d_);
    for (std::size_t j = d_; j-- > 0;) {
      idx[j] = static_cast<std::int64_t>(id % per_axis_);
      id /= static_cast<GridId>(per_axis_);
    }
    return idx;
  }

  std::optional<GridId> id_of(std::span<const std::int64_t> idx) const {
    std::size_t id = 0;
    for (std::size_t j = 0; j < d_; ++j) {
      if (idx[j] < 0 || idx[j] >= static_cast<std::int64_t>(per_axis_)) return std::nullopt;
      id = id * per_axis_ + static_cast<std::size_t>(idx[j]);
    }
    return static_cast<GridId>(id);
  }

  Point grid_point(GridId id) const {
    const auto idx = index_of(id);
    Point p(d_);
    for (std::size_t j = 0; j < d_; ++j) p[j] = static_cast<double>(idx[j]) * h_;
    return p;
  }

  /// Grid id whose cell contains z (the last cell also takes coordinate 1).
  GridId cell_of(std::span<const double> z) const {
    std::size_t id = 0;
    for (std::size_t j = 0; j < d_; ++j) {
      auto c = static_cast<std::int64_t>(std::floor(z[j] / h_));
      c = std::clamp<std::int64_t>(c, 0, static_cast<std::int64_t>(per_axis_) - 1);
      id = id * per_axis_ + static_cast<std::size_t>(c);
    }
    return static_cast<GridId>(id);
  }

  std::span<const VertexId> members(GridId id) const noexcept {
    return {members_.data() + starts_[id], starts_[id + 1] - starts_[id]};
  }
  std::size_t occupancy(GridId id) const noexcept { return starts_[id + 1] - starts_[id]; }
  GridId cell_of_vertex(VertexId v) const noexcept { return cell_of_vertex_[v]; }
  const std::vector<GridId>& cells_of_vertices() const noexcept { return cell_of_vertex_; }

  /// Distance between two grid points, computed from the lattice offset so
  /// that it is exactly symmetric.
  double grid_distance(GridId a, GridId b) const {
    std::array<std::int64_t, kMaxDim> delta{};
    const auto base = static_cast<GridId>(per_axis_);
    for (std::size_t j = d_; j-- > 0; a /= base, b /= base)
      delta[j] = static_cast<std::int64_t>(a % base) - static_cast<std::int64_t>(b % base);
    return offset_length(std::span<const std::int64_t>(delta.data(), d_));
  }

  double distance_to(GridId a, std::span<const double> z) const {
    const auto p = grid_point(a);
    return norm_.distance(p, z);
  }

  std::size_t offset_count() const noexcept { return offsets_.size() / d_; }

  /// Calls f(q) for every H-neighbour q of p.
  template <class F>
  void for_each_h_neighbor(GridId p, F&& f) const {
    const auto idx = index_of(p);
    std::vector<std::int64_t> q(d_);
    for (std::size_t o = 0; o < offset_count(); ++o) {
      bool inside = true;
      for (std::size_t j = 0; j < d_ && inside; ++j) {
        q[j] = idx[j] + offsets_[o * d_ + j];
        inside = q[j] >= 0 && q[j] < static_cast<std::int64_t>(per_axis_);
      }
      if (inside) f(*id_of(q));
    }
  }

  /// Calls f(q) for every grid point q with grid_distance(p, q) <= radius.
  template <class F>
  void for_each_within(GridId p, double radius, F&& f) const {
    const auto idx = index_of(p);
    const auto m = static_cast<std::int64_t>(std::floor(radius / h_ + 1e-9));
    std::vector<std::int64_t> lo(d_), hi(d_), cur(d_), delta(d_);
    for (std::size_t j = 0; j < d_; ++j) {
      lo[j] = std::max<std::int64_t>(0, idx[j] - m);
      hi[j] = std::min<std::int64_t>(static_cast<std::int64_t>(per_axis_) - 1, idx[j] + m);
      cur[j] = lo[j];
    }
    while (true) {
      for (std::size_t j = 0; j < d_; ++j) delta[j] = cur[j] - idx[j];
      if (offset_length(delta) <= radius) f(*id_of(cur));
      std::size_t j = d_;
      while (j > 0 && cur[j - 1] == hi[j - 1]) {
        cur[j - 1] = lo[j - 1];
        --j;
      }
      if (j == 0) break;
      ++cur[j - 1];
    }
  }

 private:
  double offset_length(std::span<const std::int64_t> delta) const {
    if (norm_.is_infinite()) {
      std::int64_t m = 0;
      for (auto x : delta) m = std::max<std::int64_t>(m, x < 0 ? -x : x);
      return static_cast<double>(m) * h_;
    }
    double acc = 0.0;
    for (auto x : delta) {
      const double ax = std::abs(static_cast<double>(x));
      acc += norm_.is_euclidean() ? ax * ax : std::pow(ax, norm_.p());
    }
    return (norm_.is_euclidean() ? std::sqrt(acc) : std::pow(acc, 1.0 / norm_.p())) * h_;
  }

  static bool in_unit_cube(std::span<const double> z) {
    return std::all_of(z.begin(), z.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
  }

  NormSpec norm_;
  double eta_, r_;
  std::size_t K_;
  std::size_t d_ = 0;
  double h_ = 0.0, r_prime_ = 0.0;
  std::size_t per_axis_ = 0, count_ = 0;
  std::vector<std::uint32_t> starts_;
  std::vector<VertexId> members_;
  std::vector<GridId> cell_of_vertex_;
  std::vector<std::int64_t> offsets_;
};

inline Dissection build_dissection(const PointSet& points, const NormSpec& norm, double eta, double r,
                                   std::size_t K) {
  return Dissection(points, norm, eta, r, K);
}

/// Geometric diameter of a set of grid points, exact or bracketed.
struct DiameterBounds {
  double lo = 0.0;
  double hi = 0.0;
  bool exact() const noexcept { return lo == hi; }
};

inline constexpr std::size_t kExactDiameterLimit = 2000;

inline DiameterBounds exact_diameter(const Dissection& diss, std::span<const GridId> nodes) {
  double best = 0.0;
  std::vector<Point> pts;
  pts.reserve(nodes.size());
  for (GridId g : nodes) pts.push_back(diss.grid_point(g));
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) best = std::max(best, diss.norm().distance(pts[a], pts[b]));
  return {best, best};
}

/// Exact below kExactDiameterLimit nodes; otherwise a double sweep, which
/// brackets the diameter within a factor of two.
inline DiameterBounds component_diameter(const Dissection& diss, std::span<const GridId> nodes) {
  if (nodes.size() <= kExactDiameterLimit) return exact_diameter(diss, nodes);
  auto farthest = [&](GridId from) {
    const auto p = diss.grid_point(from);
    GridId arg = from;
    double best = -1.0;
    for (GridId g : nodes) {
      const double dist = diss.norm().distance(p, diss.grid_point(g));
      if (dist > best) {
        best = dist;
        arg = g;
      }
    }
    return std::pair{arg, best};
  };
  const auto [b, unused] = farthest(nodes.front());
  (void)unused;
  const auto [c, len] = farthest(b);
  (void)c;
  return {len, 2.0 * len};
}

struct GridComponent {
  std::vector<GridId> nodes;  // ascending
  DiameterBounds diameter;
};

/// Dense / sparse / bad classification and the graphs D and B.
struct StructureGraphs {
  std::vector<char> dense;
  std::vector<char> bad;
  std::vector<std::int32_t> d_label;  // component of D, -1 when sparse
  std::vector<std::int32_t> b_label;  // component of B, -1 when not bad
  std::vector<GridComponent> d_components;
  std::vector<GridComponent> b_components;
  std::vector<char> d_large;  // diameter >= r'
  std::optional<std::size_t> giant;

  std::size_t large_count() const {
    return static_cast<std::size_t>(std::count(d_large.begin(), d_large.end(), 1));
  }
};

namespace detail {

inline std::vector<GridComponent> label_components(const Dissection& diss, const std::vector<char>& member,
                                                   std::vector<std::int32_t>& label) {
  std::vector<GridComponent> comps;
  label.assign(diss.grid_count(), -1);
  std::vector<GridId> stack;
  for (GridId s = 0; s < diss.grid_count(); ++s) {
    if (!member[s] || label[s] >= 0) continue;
    const auto id = static_cast<std::int32_t>(comps.size());
    comps.emplace_back();
    label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const GridId p = stack.back();
      stack.pop_back();
      comps.back().nodes.push_back(p);
      diss.for_each_h_neighbor(p, [&](GridId q) {
        if (member[q] && label[q] < 0) {
          label[q] = id;
          stack.push_back(q);
        }
      });
    }
    std::sort(comps.back().nodes.begin(), comps.back().nodes.end());
  }
  for (auto& c : comps) c.diameter = component_diameter(diss, c.nodes);
  return comps;
}

// Whether diam >= t, resolving a bracketed diameter exactly when needed.
inline bool diameter_at_least(const Dissection& diss, GridComponent& c, double t) {
  if (c.diameter.lo >= t) return true;
  if (c.diameter.hi < t) return false;
  c.diameter = exact_diameter(diss, c.nodes);
  return c.diameter.lo >= t;
}

}  // namespace detail

inline StructureGraphs classify_and_extract(const Dissection& diss) {
  StructureGraphs sg;
  const std::size_t G = diss.grid_count();
  sg.dense.assign(G, 0);
  sg.bad.assign(G, 0);
  for (GridId p = 0; p < G; ++p) sg.dense[p] = diss.occupancy(p) >= diss.dense_threshold();
  for (GridId p = 0; p < G; ++p) {
    if (sg.dense[p]) continue;
    bool any_dense = false;
    diss.for_each_h_neighbor(p, [&](GridId q) { any_dense = any_dense || sg.dense[q]; });
    sg.bad[p] = !any_dense;
  }
  sg.d_components = detail::label_components(diss, sg.dense, sg.d_label);
  sg.b_components = detail::label_components(diss, sg.bad, sg.b_label);
  sg.d_large.assign(sg.d_components.size(), 0);
  for (std::size_t c = 0; c < sg.d_components.size(); ++c)
    sg.d_large[c] = detail::diameter_at_least(diss, sg.d_components[c], diss.r_prime());
  if (sg.large_count() == 1)
    sg.giant = static_cast<std::size_t>(std::find(sg.d_large.begin(), sg.d_large.end(), 1) - sg.d_large.begin());
  return sg;
}

/// Shortest path in D from `from` to `to` using only dense grid points within
/// `radius` of `center` and not flagged in `blocked`. BFS with neighbours in
/// ascending id order, so the result is deterministic.
inline std::optional<std::vector<GridId>> dense_path_within(const StructureGraphs& sg, const Dissection& diss,
                                                            GridId from, GridId to, GridId center, double radius,
                                                            std::span<const char> blocked = {}) {
  auto allowed = [&](GridId p) {
    return sg.dense[p] && (blocked.empty() || !blocked[p]) && diss.grid_distance(center, p) <= radius;
  };
  if (!allowed(from) || !allowed(to)) return std::nullopt;
  if (from == to) return std::vector<GridId>{from};
  std::vector<GridId> parent(diss.grid_count(), static_cast<GridId>(-1));
  std::vector<GridId> queue{from};
  parent[from] = from;
  std::vector<GridId> nb;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const GridId p = queue[head];
    nb.clear();
    diss.for_each_h_neighbor(p, [&](GridId q) { nb.push_back(q); });
    for (GridId q : nb) {
      if (parent[q] != static_cast<GridId>(-1) || !allowed(q)) continue;
      parent[q] = p;
      if (q == to) {
        std::vector<GridId> path{to};
        while (path.back() != from) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(q);
    }
  }
  return std::nullopt;
}

enum class Property { P1 = 0, P2, P3, P4, P5, P6 };

inline const char* property_name(Property p) {
  static const char* names[] = {"P1", "P2", "P3", "P4", "P5", "P6"};
  return names[static_cast<int>(p)];
}

/// Separation S, locality L and proximity M of the structural properties, in units of r.
struct AuditConstants {
  double separation = 1000.0;
  double locality = 100.0;
  double proximity = 25.0;
  std::size_t p5_samples = 64;
  std::uint64_t p5_seed = 0x5eed;

  static AuditConstants paper() { return {}; }
  /// Small enough that P1 is satisfiable inside the unit cube.
  static AuditConstants desk() {
    AuditConstants c;
    c.separation = 2.0;
    c.locality = 8.0;
    c.proximity = 4.0;
    return c;
  }
};

/// Concrete evidence for a failed property: component ids (D components for
/// P1, P2, P6; the small component then the bad component for P3), grid
/// points and the offending distance or diameter.
struct Witness {
  std::vector<std::size_t> components;
  std::vector<GridId> grid_points;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string summary;
};

struct Verdict {
  Property property = Property::P1;
  bool pass = true;
  Witness witness;
};

struct PropertyAudit {
  AuditConstants constants;
  std::array<Verdict, 6> verdicts;
  std::size_t p5_pairs_checked = 0;

  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
  const Verdict& operator[](Property p) const { return verdicts[static_cast<int>(p)]; }
  std::optional<Property> first_failure() const {
    for (const auto& v : verdicts)
      if (!v.pass) return v.property;
    return std::nullopt;
  }
};

namespace detail {

inline std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline bool in_small_component(const StructureGraphs& sg, GridId p) {
  return sg.d_label[p] >= 0 && !sg.d_large[static_cast<std::size_t>(sg.d_label[p])];
}

inline std::vector<GridId> small_component_points(const StructureGraphs& sg) {
  std::vector<GridId> out;
  for (std::size_t c = 0; c < sg.d_components.size(); ++c)
    if (!sg.d_large[c]) out.insert(out.end(), sg.d_components[c].nodes.begin(), sg.d_components[c].nodes.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<GridId> bad_points(const StructureGraphs& sg) {
  std::vector<GridId> out;
  for (GridId p = 0; p < sg.bad.size(); ++p)
    if (sg.bad[p]) out.push_back(p);
  return out;
}

inline std::vector<GridId> large_dense_points(const StructureGraphs& sg) {
  std::vector<GridId> out;
  for (GridId p = 0; p < sg.dense.size(); ++p)
    if (sg.dense[p] && !in_small_component(sg, p)) out.push_back(p);
  return out;
}

inline Verdict check_p5_pair(const StructureGraphs& sg, const Dissection& diss, const AuditConstants& c, GridId p1,
                             GridId p2) {
  Verdict v{Property::P5, true, {}};
  if (dense_path_within(sg, diss, p1, p2, p1, c.locality * diss.r())) return v;
  v.pass = false;
  v.witness.grid_points = {p1, p2};
  v.witness.value = diss.grid_distance(p1, p2);
  v.witness.summary = "no D-path from " + std::to_string(p1) + " to " + std::to_string(p2) + " inside B(p1, " +
                      fmt_num(c.locality) + "r)";
  return v;
}

}  // namespace detail

/// Audits P1-P6. P5 is checked on `p5_pairs` plus a seeded random sample of
/// qualifying pairs; the other properties are checked exhaustively.
inline PropertyAudit audit_properties(StructureGraphs& sg, const Dissection& diss, const AuditConstants& c,
                                      std::span<const std::pair<GridId, GridId>> p5_pairs = {}) {
  PropertyAudit audit;
  audit.constants = c;
  for (int k = 0; k < 6; ++k) audit.verdicts[k].property = static_cast<Property>(k);
  const double rp = diss.r_prime(), far = c.separation * diss.r();

  // P1: every D-component is small (< r') or huge (> S r).
  for (std::size_t k = 0; k < sg.d_components.size(); ++k) {
    auto& comp = sg.d_components[k];
    if (!sg.d_large[k]) continue;
    if (comp.diameter.lo > far) continue;
    if (!comp.diameter.exact()) comp.diameter = exact_diameter(diss, comp.nodes);
    if (comp.diameter.lo > far) continue;
    auto& v = audit.verdicts[0];
    v.pass = false;
    v.witness.components = {k};
    v.witness.value = comp.diameter.lo;
    v.witness.summary = "component " + std::to_string(k) + " has diameter " + detail::fmt_num(comp.diameter.lo);
    break;
  }

  const auto small = detail::small_component_points(sg);
  const auto bad = detail::bad_points(sg);

  // P2: points of distinct small components are far apart.
  for (std::size_t a = 0; a < small.size() && audit.verdicts[1].pass; ++a)
    for (std::size_t b = a + 1; b < small.size(); ++b) {
      if (sg.d_label[small[a]] == sg.d_label[small[b]]) continue;
      const double dist = diss.grid_distance(small[a], small[b]);
      if (dist > far) continue;
      auto& v = audit.verdicts[1];
      v.pass = false;
      v.witness.components = {static_cast<std::size_t>(sg.d_label[small[a]]),
                              static_cast<std::size_t>(sg.d_label[small[b]])};
      v.witness.grid_points = {small[a], small[b]};
      v.witness.value = dist;
      v.witness.summary = "small components within " + detail::fmt_num(dist);
      break;
    }

  // P3: small-component points are far from bad points.
  for (std::size_t a = 0; a < small.size() && audit.verdicts[2].pass; ++a)
    for (GridId q : bad) {
      const double dist = diss.grid_distance(small[a], q);
      if (dist > far) continue;
      auto& v = audit.verdicts[2];
      v.pass = false;
      v.witness.components = {static_cast<std::size_t>(sg.d_label[small[a]]),
                              static_cast<std::size_t>(sg.b_label[q])};
      v.witness.grid_points = {small[a], q};
      v.witness.value = dist;
      v.witness.summary = "small component point near bad point at " + detail::fmt_num(dist);
      break;
    }

  // P4: bad pairs are either close or far.
  for (std::size_t a = 0; a < bad.size() && audit.verdicts[3].pass; ++a)
    for (std::size_t b = a + 1; b < bad.size(); ++b) {
      const double dist = diss.grid_distance(bad[a], bad[b]);
      if (dist < rp || dist > far) continue;
      auto& v = audit.verdicts[3];
      v.pass = false;
      v.witness.grid_points = {bad[a], bad[b]};
      v.witness.value = dist;
      v.witness.summary = "bad points at intermediate distance " + detail::fmt_num(dist);
      break;
    }

  // P5: nearby dense points outside small components are joined locally.
  {
    const auto big = detail::large_dense_points(sg);
    const double near = c.proximity * diss.r();
    auto qualifies = [&](GridId p1, GridId p2) {
      return sg.dense[p1] && sg.dense[p2] && !detail::in_small_component(sg, p1) &&
             !detail::in_small_component(sg, p2) && diss.grid_distance(p1, p2) < near;
    };
    auto check = [&](GridId p1, GridId p2) {
      if (!qualifies(p1, p2)) return true;
      ++audit.p5_pairs_checked;
      auto v = detail::check_p5_pair(sg, diss, c, p1, p2);
      if (!v.pass) audit.verdicts[4] = std::move(v);
      return audit.verdicts[4].pass;
    };
    bool ok = true;
    for (auto [p1, p2] : p5_pairs) {
      require(p1 < diss.grid_count() && p2 < diss.grid_count(), "audit_properties: P5 pair out of range");
      if (!(ok = check(p1, p2))) break;
    }
    CounterRng rng(c.p5_seed);
    std::size_t drawn = 0;
    for (std::size_t attempt = 0; ok && big.size() >= 2 && drawn < c.p5_samples && attempt < 50 * c.p5_samples;
         ++attempt) {
      const GridId p1 = big[rng.below(big.size())], p2 = big[rng.below(big.size())];
      if (p1 == p2 || !qualifies(p1, p2)) continue;
      ++drawn;
      ok = check(p1, p2);
    }
  }

  // P6: exactly one large component.
  if (sg.large_count() != 1) {
    auto& v = audit.verdicts[5];
    v.pass = false;
    for (std::size_t k = 0; k < sg.d_large.size(); ++k)
      if (sg.d_large[k]) v.witness.components.push_back(k);
    v.witness.value = static_cast<double>(v.witness.components.size());
    v.witness.summary = std::to_string(v.witness.components.size()) + " components of diameter >= r'";
  }
  return audit;
}

/// Re-evaluates a failed verdict from its witness alone; true iff the failure reproduces.
inline bool recheck_witness(const StructureGraphs& sg, const Dissection& diss, const AuditConstants& c,
                            const Verdict& v) {
  if (v.pass) return false;
  const double rp = diss.r_prime(), far = c.separation * diss.r();
  const auto& w = v.witness;
  switch (v.property) {
    case Property::P1: {
      if (w.components.size() != 1 || w.components[0] >= sg.d_components.size()) return false;
      const double diam = exact_diameter(diss, sg.d_components[w.components[0]].nodes).lo;
      return diam >= rp && diam <= far;
    }
    case Property::P2: {
      if (w.grid_points.size() != 2) return false;
      const GridId a = w.grid_points[0], b = w.grid_points[1];
      return detail::in_small_component(sg, a) && detail::in_small_component(sg, b) &&
             sg.d_label[a] != sg.d_label[b] && diss.grid_distance(a, b) <= far;
    }
    case Property::P3: {
      if (w.grid_points.size() != 2) return false;
      const GridId a = w.grid_points[0], b = w.grid_points[1];
      return detail::in_small_component(sg, a) && sg.bad[b] && diss.grid_distance(a, b) <= far;
    }
    case Property::P4: {
      if (w.grid_points.size() != 2) return false;
      const GridId a = w.grid_points[0], b = w.grid_points[1];
      const double dist = diss.grid_distance(a, b);
      return sg.bad[a] && sg.bad[b] && dist >= rp && dist <= far;
    }
    case Property::P5: {
      if (w.grid_points.size() != 2) return false;
      const GridId a = w.grid_points[0], b = w.grid_points[1];
      return sg.dense[a] && sg.dense[b] && !detail::in_small_component(sg, a) &&
             !detail::in_small_component(sg, b) && diss.grid_distance(a, b) < c.proximity * diss.r() &&
             !dense_path_within(sg, diss, a, b, a, c.locality * diss.r());
    }
    case Property::P6: {
      std::size_t large = 0;
      for (std::size_t k = 0; k < sg.d_components.size(); ++k) {
        GridComponent copy = sg.d_components[k];
        large += detail::diameter_at_least(diss, copy, rp);
      }
      return large != 1 && large == w.components.size();
    }
  }
  return false;
}

/// One CSV row per property: property,pass,witness.
inline std::string audit_csv(const PropertyAudit& audit) {
  std::ostringstream os;
  os << "property,pass,witness\n";
  for (const auto& v : audit.verdicts) {
    std::string summary = v.witness.summary;
    std::replace(summary.begin(), summary.end(), ',', ';');
    os << property_name(v.property) << ',' << (v.pass ? 1 : 0) << ',' << summary << '\n';
  }
  return os.str();
}

/// H(x) = x ln x - x + 1, with H(0) = 1.
inline double entropy_H(double x) {
  require(x >= 0.0, "entropy_H: x must be nonnegative");
  if (x == 0.0) return 1.0;
  return x * std::log(x) - x + 1.0;
}

/// exp(-mu H(k/mu)) with mu = n p, an upper bound on P(Bin(n, p) <= k) for k <= mu.
inline double chernoff_upper_bound(std::size_t n, double p, double k) {
  require(p >= 0.0 && p <= 1.0, "chernoff_upper_bound: p must lie in [0, 1]");
  const double mu = static_cast<double>(n) * p;
  require(k >= 0.0 && k <= mu, "chernoff_upper_bound: need 0 <= k <= np");
  if (mu == 0.0) return 1.0;
  return std::exp(-mu * entropy_H(k / mu));
}

}  // namespace rgg
