#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/rng.hpp"

namespace rgg {

using Point = std::vector<double>;
using VertexId = std::uint32_t;

/// The l_p norm on R^d, 1 < p <= infinity.
class NormSpec {
 public:
  NormSpec(int d, double p) : d_(d), p_(p) {
    require(d >= 2, "NormSpec: dimension must be at least 2");
    require(p > 1.0, "NormSpec: p must exceed 1");
    infinite_ = std::isinf(p);
    euclidean_ = !infinite_ && p == 2.0;
    // 1/infinity is read as 0, so the factor is 1 for the max norm.
    diameter_factor_ = infinite_ ? 1.0 : std::pow(static_cast<double>(d), 1.0 / p);
  }

  static NormSpec euclidean(int d = 2) { return NormSpec(d, 2.0); }
  static NormSpec max_norm(int d = 2) { return NormSpec(d, std::numeric_limits<double>::infinity()); }

  int d() const noexcept { return d_; }
  double p() const noexcept { return p_; }
  bool is_infinite() const noexcept { return infinite_; }
  bool is_euclidean() const noexcept { return euclidean_; }
  bool is_euclidean_plane() const noexcept { return euclidean_ && d_ == 2; }

  /// d^{1/p}: the l_p diameter of the unit cube.
  double diameter_factor() const noexcept { return diameter_factor_; }

  /// Unchecked distance; both spans must have length d().
  double distance(std::span<const double> a, std::span<const double> b) const noexcept {
    if (euclidean_) {
      double s = 0.0;
      for (int i = 0; i < d_; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
      }
      return std::sqrt(s);
    }
    if (infinite_) {
      double m = 0.0;
      for (int i = 0; i < d_; ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    }
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += std::pow(std::abs(a[i] - b[i]), p_);
    return std::pow(s, 1.0 / p_);
  }

  std::string describe() const {
    return "l_" + (infinite_ ? std::string("inf") : std::to_string(p_)) + " in d=" + std::to_string(d_);
  }

  friend bool operator==(const NormSpec& a, const NormSpec& b) noexcept {
    return a.d_ == b.d_ && (a.p_ == b.p_ || (a.infinite_ && b.infinite_));
  }

 private:
  int d_;
  double p_;
  bool infinite_ = false;
  bool euclidean_ = false;
  double diameter_factor_ = 1.0;
};

inline double lp_distance(std::span<const double> a, std::span<const double> b, const NormSpec& norm) {
  require(a.size() == static_cast<std::size_t>(norm.d()) && b.size() == a.size(),
          "lp_distance: point dimension does not match the norm");
  return norm.distance(a, b);
}

/// A flat, row-major list of points of a fixed dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), coords_(std::move(flat)) {
    require(dim_ > 0 && coords_.size() % dim_ == 0, "PointSet: coordinate count is not a multiple of dim");
  }

  static PointSet from_points(std::span<const Point> pts) {
    require(!pts.empty(), "PointSet::from_points: need at least one point to infer the dimension");
    PointSet out(pts.front().size());
    for (const auto& p : pts) out.push_back(p);
    return out;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }

  Point point(std::size_t i) const {
    auto s = (*this)[i];
    return {s.begin(), s.end()};
  }

  void push_back(std::span<const double> p) {
    require(p.size() == dim_, "PointSet::push_back: dimension mismatch");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void push_back(std::initializer_list<double> p) { push_back(std::span<const double>(p.begin(), p.size())); }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& flat() const noexcept { return coords_; }

  bool in_unit_cube() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](double c) { return c >= 0.0 && c <= 1.0; });
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// n i.i.d. uniform points of [0,1)^d. Coordinate j of point i is the
/// (i*d + j)-th output of a counter-based stream, so prefixes are stable in n.
inline PointSet sample_uniform_points(std::size_t n, const NormSpec& norm, std::uint64_t seed) {
  if (n == 0) throw EmptyInput("sample_uniform_points: n must be at least 1");
  const auto d = static_cast<std::size_t>(norm.d());
  std::vector<double> flat(n * d);
  const CounterRng rng(seed);
  for (std::size_t k = 0; k < flat.size(); ++k) flat[k] = CounterRng::to_unit(rng.at(k));
  return PointSet(d, std::move(flat));
}

/// Buckets point indices by the integer cell floor(z / cell_side).
/// Holds a pointer to the indexed PointSet, which must outlive the index.
class GridIndex {
 public:
  GridIndex(const PointSet& points, double cell_side) : points_(&points), side_(cell_side) {
    require(cell_side > 0.0 && std::isfinite(cell_side), "grid_build: cell_side must be positive");
    dim_ = points.dim();
    const std::size_t n = points.size();
    std::vector<std::int64_t> cells(n * dim_);
    lo_.assign(dim_, std::numeric_limits<std::int64_t>::max());
    hi_.assign(dim_, std::numeric_limits<std::int64_t>::min());
    for (std::size_t i = 0; i < n; ++i) {
      auto p = points[i];
      for (std::size_t j = 0; j < dim_; ++j) {
        const auto c = coord(p[j]);
        cells[i * dim_ + j] = c;
        lo_[j] = std::min(lo_[j], c);
        hi_[j] = std::max(hi_[j], c);
      }
    }
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    auto less = [&](VertexId a, VertexId b) {
      for (std::size_t j = 0; j < dim_; ++j) {
        if (cells[a * dim_ + j] != cells[b * dim_ + j]) return cells[a * dim_ + j] < cells[b * dim_ + j];
      }
      return a < b;
    };
    std::sort(order.begin(), order.end(), less);
    members_ = order;
    starts_.push_back(0);
    for (std::size_t k = 0; k < n; ++k) {
      const VertexId i = order[k];
      const bool fresh = k == 0 || !std::equal(cells.begin() + i * dim_, cells.begin() + (i + 1) * dim_,
                                               cells.begin() + order[k - 1] * dim_);
      if (fresh) {
        if (k != 0) starts_.push_back(static_cast<std::uint32_t>(k));
        keys_.insert(keys_.end(), cells.begin() + i * dim_, cells.begin() + (i + 1) * dim_);
      }
    }
    starts_.push_back(static_cast<std::uint32_t>(n));
    if (n == 0) starts_.assign(1, 0);

    // Dense lookup table when the bounding box of occupied cells is small.
    double box = 1.0;
    for (std::size_t j = 0; j < dim_ && n > 0; ++j) box *= static_cast<double>(hi_[j] - lo_[j] + 1);
    if (n > 0 && box <= std::max<double>(1 << 20, 8.0 * static_cast<double>(n))) {
      dense_.assign(static_cast<std::size_t>(box), -1);
      for (std::size_t b = 0; b < bucket_count(); ++b) {
        dense_[dense_offset(std::span<const std::int64_t>(keys_.data() + b * dim_, dim_))] =
            static_cast<std::int32_t>(b);
      }
    }
  }

  double cell_side() const noexcept { return side_; }
  std::size_t dim() const noexcept { return dim_; }
  const PointSet& points() const noexcept { return *points_; }

  /// Number of non-empty buckets.
  std::size_t bucket_count() const noexcept { return starts_.size() - 1; }

  std::int64_t coord(double z) const noexcept { return static_cast<std::int64_t>(std::floor(z / side_)); }

  std::vector<std::int64_t> cell_of(std::span<const double> p) const {
    std::vector<std::int64_t> c(dim_);
    for (std::size_t j = 0; j < dim_; ++j) c[j] = coord(p[j]);
    return c;
  }

  std::span<const std::int64_t> bucket_key(std::size_t b) const noexcept {
    return {keys_.data() + b * dim_, dim_};
  }
  std::span<const VertexId> bucket_members(std::size_t b) const noexcept {
    return {members_.data() + starts_[b], starts_[b + 1] - starts_[b]};
  }

  /// Members of the bucket with the given integer key (empty when absent).
  std::span<const VertexId> bucket(std::span<const std::int64_t> key) const {
    const auto b = find(key);
    if (b < 0) return {};
    return bucket_members(static_cast<std::size_t>(b));
  }

  /// Calls f(j) for every indexed point whose cell lies in the closed box [lo, hi].
  template <class F>
  void for_each_in_box(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi, F&& f) const {
    if (bucket_count() == 0) return;
    std::vector<std::int64_t> a(dim_), b(dim_);
    double cells = 1.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      a[j] = std::max(lo[j], lo_[j]);
      b[j] = std::min(hi[j], hi_[j]);
      if (a[j] > b[j]) return;
      cells *= static_cast<double>(b[j] - a[j] + 1);
    }
    if (cells >= static_cast<double>(bucket_count())) {
      for (std::size_t k = 0; k < bucket_count(); ++k) {
        auto key = bucket_key(k);
        bool inside = true;
        for (std::size_t j = 0; j < dim_ && inside; ++j) inside = key[j] >= a[j] && key[j] <= b[j];
        if (inside)
          for (VertexId v : bucket_members(k)) f(v);
      }
      return;
    }
    std::vector<std::int64_t> cur = a;
    while (true) {
      for (VertexId v : bucket(cur)) f(v);
      bool done = true;
      for (std::size_t j = dim_; j-- > 0;) {
        if (cur[j] < b[j]) {
          ++cur[j];
          done = false;
          break;
        }
        cur[j] = a[j];
      }
      if (done) return;
    }
  }

  /// Calls f(j, dist) for every indexed j != exclude with distance(q, x_j) <= radius.
  template <class F>
  void for_each_within(std::span<const double> q, double radius, const NormSpec& norm, std::size_t exclude,
                       F&& f) const {
    std::vector<std::int64_t> lo(dim_), hi(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      lo[j] = coord(q[j] - radius);
      hi[j] = coord(q[j] + radius);
    }
    for_each_in_box(lo, hi, [&](VertexId v) {
      if (v == exclude) return;
      const double dist = norm.distance(q, (*points_)[v]);
      if (dist <= radius) f(v, dist);
    });
  }

 private:
  std::size_t dense_offset(std::span<const std::int64_t> key) const noexcept {
    std::size_t off = 0;
    for (std::size_t j = 0; j < dim_; ++j) {
      off = off * static_cast<std::size_t>(hi_[j] - lo_[j] + 1) + static_cast<std::size_t>(key[j] - lo_[j]);
    }
    return off;
  }

  std::ptrdiff_t find(std::span<const std::int64_t> key) const {
    if (bucket_count() == 0) return -1;
    for (std::size_t j = 0; j < dim_; ++j)
      if (key[j] < lo_[j] || key[j] > hi_[j]) return -1;
    if (!dense_.empty()) return dense_[dense_offset(key)];
    std::size_t first = 0, count = bucket_count();
    while (count > 0) {
      const std::size_t step = count / 2;
      const std::size_t mid = first + step;
      if (std::lexicographical_compare(keys_.begin() + mid * dim_, keys_.begin() + (mid + 1) * dim_, key.begin(),
                                       key.end())) {
        first = mid + 1;
        count -= step + 1;
      } else {
        count = step;
      }
    }
    if (first < bucket_count() && std::equal(key.begin(), key.end(), keys_.begin() + first * dim_))
      return static_cast<std::ptrdiff_t>(first);
    return -1;
  }

  const PointSet* points_;
  double side_;
  std::size_t dim_ = 0;
  std::vector<std::int64_t> lo_, hi_;
  std::vector<std::int64_t> keys_;     // bucket_count() * dim, lexicographically sorted
  std::vector<std::uint32_t> starts_;  // CSR offsets into members_
  std::vector<VertexId> members_;
  std::vector<std::int32_t> dense_;
};

inline GridIndex grid_build(const PointSet& points, double cell_side) { return GridIndex(points, cell_side); }

/// Indices j != i with distance(x_i, x_j) <= radius, ascending.
inline std::vector<VertexId> grid_neighbors(const GridIndex& idx, std::size_t i, double radius,
                                            const NormSpec& norm) {
  require(i < idx.points().size(), "grid_neighbors: unknown point index");
  require(radius >= 0.0, "grid_neighbors: radius must be nonnegative");
  std::vector<VertexId> out;
  idx.for_each_within(idx.points()[i], radius, norm, i, [&](VertexId v, double) { out.push_back(v); });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rgg
