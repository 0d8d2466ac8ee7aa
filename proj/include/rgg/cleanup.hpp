#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "rgg/dissection.hpp"
#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"

namespace rgg {

/// 6 for the Euclidean plane, otherwise (2 ceil(d^{1/p}))^d.
inline std::size_t sector_count(const NormSpec& norm) {
  if (norm.is_euclidean_plane()) return 6;
  const auto c = static_cast<std::size_t>(std::ceil(norm.diameter_factor() - 1e-12));
  std::size_t k = 1;
  for (int j = 0; j < norm.d(); ++j) k *= 2 * c;
  return k;
}

/// Partition of the closed ball B(center, radius) into sector_count parts of
/// diameter at most `radius`: 60-degree sectors in the Euclidean plane,
/// otherwise a grid of cubes of side radius / ceil(d^{1/p}) over [-radius, radius]^d.
class SectorPartition {
 public:
  SectorPartition(Point center, double radius, const NormSpec& norm)
      : center_(std::move(center)), radius_(radius), norm_(norm) {
    require(radius > 0.0, "ball_sector_partition: radius must be positive");
    require(center_.size() == static_cast<std::size_t>(norm.d()), "ball_sector_partition: dimension mismatch");
    count_ = sector_count(norm);
    per_axis_ = static_cast<std::size_t>(std::ceil(norm.diameter_factor() - 1e-12)) * 2;
    side_ = 2.0 * radius / static_cast<double>(per_axis_);
  }

  std::size_t count() const noexcept { return count_; }
  double radius() const noexcept { return radius_; }
  const Point& center() const noexcept { return center_; }

  /// Index of the part containing z, or nullopt outside the ball.
  std::optional<std::size_t> part_of(std::span<const double> z) const {
    if (norm_.distance(center_, z) > radius_) return std::nullopt;
    if (norm_.is_euclidean_plane()) {
      const double angle = std::atan2(z[1] - center_[1], z[0] - center_[0]) + std::numbers::pi;
      auto k = static_cast<std::size_t>(std::floor(angle / (std::numbers::pi / 3.0)));
      return std::min<std::size_t>(k, 5);
    }
    std::size_t id = 0;
    for (std::size_t j = 0; j < center_.size(); ++j) {
      auto c = static_cast<std::int64_t>(std::floor((z[j] - center_[j] + radius_) / side_));
      c = std::clamp<std::int64_t>(c, 0, static_cast<std::int64_t>(per_axis_) - 1);
      id = id * per_axis_ + static_cast<std::size_t>(c);
    }
    return id;
  }

  bool contains(std::size_t part, std::span<const double> z) const { return part_of(z) == part; }

 private:
  Point center_;
  double radius_;
  NormSpec norm_;
  std::size_t count_ = 0, per_axis_ = 0;
  double side_ = 0.0;
};

inline SectorPartition ball_sector_partition(const Point& center, double radius, const NormSpec& norm) {
  return SectorPartition(center, radius, norm);
}

/// Path that starts at anchors[0], visits every vertex of `labeled`, uses each
/// anchor once and ends at the last anchor. Labeled vertices are grouped by
/// part, each nonempty part (a clique) is run between consecutive anchors;
/// anchors beyond the number of nonempty parts follow directly.
inline std::vector<VertexId> cleanup_path(const PointSet& points, const Dissection& diss, GridId q,
                                          std::span<const VertexId> anchors, std::span<const VertexId> labeled,
                                          const SectorPartition& partition) {
  require(!anchors.empty(), "cleanup_path: at least one anchor required");
  const std::set<VertexId> distinct(anchors.begin(), anchors.end());
  require(distinct.size() == anchors.size(), "cleanup_path: anchors must be distinct");
  for (VertexId a : anchors)
    require(a < points.size() && diss.cell_of_vertex(a) == q, "cleanup_path: anchors must lie in V_q");
  std::vector<std::vector<VertexId>> parts(partition.count());
  for (VertexId v : labeled) {
    require(v < points.size() && !distinct.count(v), "cleanup_path: labeled vertex invalid or an anchor");
    const auto k = partition.part_of(points[v]);
    require(k.has_value(), "cleanup_path: labeled vertex outside the partitioned ball");
    parts[*k].push_back(v);
  }
  std::size_t nonempty = 0;
  for (auto& p : parts) {
    std::sort(p.begin(), p.end());
    nonempty += !p.empty();
  }
  require(anchors.size() >= nonempty + 1, "cleanup_path: not enough anchors for the occupied parts");
  std::vector<VertexId> path;
  path.reserve(anchors.size() + labeled.size());
  std::size_t next_anchor = 0;
  path.push_back(anchors[next_anchor++]);
  for (const auto& p : parts) {
    if (p.empty()) continue;
    path.insert(path.end(), p.begin(), p.end());
    path.push_back(anchors[next_anchor++]);
  }
  while (next_anchor < anchors.size()) path.push_back(anchors[next_anchor++]);
  return path;
}

}  // namespace rgg
