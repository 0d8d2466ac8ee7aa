#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "brute.hpp"
#include "rgg/cleanup.hpp"
#include "rgg/hitting_radii.hpp"
#include "rgg/rng.hpp"
#include "rgg/spanning_tree.hpp"

using namespace rgg;

namespace {

const NormSpec kPlane = NormSpec::euclidean();

// Union-find free acyclicity and spanning check, by DFS over the edge list.
bool spanning_and_acyclic(const SpanningTreePlan& t) {
  if (t.edges.size() + 1 != t.n) return false;
  std::vector<std::vector<VertexId>> adj(t.n);
  for (auto [u, v] : t.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(t.n, 0);
  std::vector<VertexId> todo{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!todo.empty()) {
    auto v = todo.back();
    todo.pop_back();
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        todo.push_back(w);
      }
  }
  return reached == t.n;
}

// Random points at their connectivity threshold; with `clusters` > 0 the
// points are packed into that many tight blobs along a diagonal.
PointSet connected_instance(std::size_t n, const NormSpec& norm, std::uint64_t seed, double& r, int clusters = 0) {
  PointSet pts = sample_uniform_points(n, norm, seed);
  if (clusters > 0) {
    PointSet packed(2);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = 0.1 + 0.8 * static_cast<double>(i % clusters) / clusters;
      packed.push_back({c + 0.02 * pts[i][0], c + 0.02 * pts[i][1]});
    }
    pts = packed;
  }
  r = rho_connected(build_edge_process(pts, norm))->radius;
  return pts;
}

std::size_t max_degree_of(const SpanningTreePlan& t) {
  std::vector<std::size_t> deg(t.n, 0);
  for (auto [u, v] : t.edges) ++deg[u], ++deg[v];
  return t.n ? *std::max_element(deg.begin(), deg.end()) : 0;
}

}  // namespace

TEST(TreeDegreeBound, MatchesFormula) {
  EXPECT_EQ(tree_degree_bound(kPlane), 26u);
  EXPECT_EQ(tree_degree_bound(NormSpec::max_norm(2)), 10u);
  EXPECT_EQ(tree_degree_bound(NormSpec::euclidean(3)), 126u);
}

TEST(BoundedDegreeTree, SingleNodeIsEmpty) {
  PointSet pts(2);
  pts.push_back({0.5, 0.5});
  const auto t = bounded_degree_spanning_tree(pts, kPlane, 0.1);
  EXPECT_EQ(t.n, 1u);
  EXPECT_TRUE(t.edges.empty());
}

TEST(BoundedDegreeTree, OneCellGivesPath) {
  PointSet pts(2);
  for (int k = 0; k < 12; ++k) pts.push_back({0.30 + 0.001 * k, 0.30 + 0.0005 * (k % 3)});
  const auto t = bounded_degree_spanning_tree(pts, kPlane, 0.5);
  EXPECT_TRUE(spanning_and_acyclic(t));
  EXPECT_EQ(max_degree_of(t), 2u);
}

TEST(BoundedDegreeTree, DisconnectedInputRejected) {
  PointSet pts(2);
  pts.push_back({0.1, 0.1});
  pts.push_back({0.9, 0.9});
  EXPECT_THROW(bounded_degree_spanning_tree(pts, kPlane, 0.1), ContractViolation);
}

TEST(BoundedDegreeTree, RandomUnitDiskInstances) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const std::size_t n = 20 + derive_seed(7, seed) % 280;
    double r = 0.0;
    const auto pts = connected_instance(n, kPlane, seed, r);
    const auto t = bounded_degree_spanning_tree(pts, kPlane, r);
    ASSERT_TRUE(spanning_and_acyclic(t)) << "seed " << seed;
    EXPECT_LE(max_degree_of(t), 26u) << "seed " << seed;
    for (auto [u, v] : t.edges) EXPECT_LE(brute::distance(pts.point(u), pts.point(v), 2.0), r);
  }
}

TEST(BoundedDegreeTree, ClusteredInstancesStayBounded) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double r = 0.0;
    const auto pts = connected_instance(400, kPlane, seed + 500, r, 5);
    const auto t = bounded_degree_spanning_tree(pts, kPlane, r);
    ASSERT_TRUE(spanning_and_acyclic(t));
    EXPECT_LE(max_degree_of(t), 26u);
  }
}

TEST(BoundedDegreeTree, MaxNormBound) {
  const auto norm = NormSpec::max_norm(2);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    double r = 0.0;
    const auto pts = connected_instance(200, norm, seed + 900, r);
    const auto t = bounded_degree_spanning_tree(pts, norm, r);
    ASSERT_TRUE(spanning_and_acyclic(t));
    EXPECT_LE(max_degree_of(t), 10u);
  }
}

TEST(DoubleTraversalWalk, SingleNode) {
  SpanningTreePlan t;
  t.n = 1;
  t.adj.resize(1);
  const auto w = double_traversal_walk(t, 0);
  EXPECT_EQ(w.nodes, std::vector<VertexId>{0});
  EXPECT_EQ(w.steps(), 0u);
}

TEST(DoubleTraversalWalk, StarFromCentre) {
  const auto t = detail::tree_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto w = double_traversal_walk(t, 0);
  EXPECT_EQ(w.steps(), 6u);
  EXPECT_EQ(std::count(w.nodes.begin(), w.nodes.end() - 1, 0u), 3);
  EXPECT_EQ(w.nodes, (std::vector<VertexId>{0, 1, 0, 2, 0, 3, 0}));
}

TEST(DoubleTraversalWalk, PathFromEnd) {
  const auto t = detail::tree_from_edges(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(double_traversal_walk(t, 0).nodes, (std::vector<VertexId>{0, 1, 2, 1, 0}));
}

TEST(DoubleTraversalWalk, InvariantsOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    double r = 0.0;
    const auto pts = connected_instance(120, kPlane, seed + 40, r);
    const auto t = bounded_degree_spanning_tree(pts, kPlane, r);
    const VertexId root = static_cast<VertexId>(seed % t.n);
    const auto w = double_traversal_walk(t, root);
    ASSERT_EQ(w.steps(), 2 * t.edges.size());
    EXPECT_EQ(w.nodes.front(), root);
    EXPECT_EQ(w.nodes.back(), root);
    std::map<std::pair<VertexId, VertexId>, int> used;
    for (std::size_t k = 0; k + 1 < w.nodes.size(); ++k) ++used[{w.nodes[k], w.nodes[k + 1]}];
    for (auto [u, v] : t.edges) {
      EXPECT_EQ((used[{u, v}]), 1);
      EXPECT_EQ((used[{v, u}]), 1);
    }
    EXPECT_EQ(used.size(), 2 * t.edges.size());
    std::vector<std::size_t> seen(t.n, 0);
    for (std::size_t k = 0; k + 1 < w.nodes.size(); ++k) ++seen[w.nodes[k]];
    for (VertexId v = 0; v < t.n; ++v) EXPECT_EQ(seen[v], t.degree(v));
  }
}

TEST(SectorPartition, Counts) {
  EXPECT_EQ(sector_count(kPlane), 6u);
  EXPECT_EQ(sector_count(NormSpec::max_norm(2)), 4u);
  EXPECT_EQ(sector_count(NormSpec::euclidean(3)), 64u);
  EXPECT_EQ(ball_sector_partition({0.5, 0.5}, 0.2, kPlane).count(), 6u);
}

TEST(SectorPartition, AngularSectorsInThePlane) {
  const auto part = ball_sector_partition({0.0, 0.0}, 1.0, kPlane);
  std::set<std::size_t> hit;
  for (int k = 0; k < 6; ++k) {
    const double a = -std::numbers::pi + (k + 0.5) * std::numbers::pi / 3.0;
    const Point z{0.5 * std::cos(a), 0.5 * std::sin(a)};
    const auto s = part.part_of(z);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(*s, static_cast<std::size_t>(k));
    EXPECT_TRUE(part.contains(*s, z));
    hit.insert(*s);
  }
  EXPECT_EQ(hit.size(), 6u);
  EXPECT_FALSE(part.part_of(Point{1.01, 0.0}).has_value());
}

TEST(SectorPartition, MaxNormSubSquares) {
  const auto norm = NormSpec::max_norm(2);
  const auto part = ball_sector_partition({0.0, 0.0}, 1.0, norm);
  EXPECT_EQ(part.count(), 4u);
  EXPECT_EQ(*part.part_of(Point{-0.5, -0.5}), 0u);
  EXPECT_EQ(*part.part_of(Point{-0.5, 0.5}), 1u);
  EXPECT_EQ(*part.part_of(Point{0.5, -0.5}), 2u);
  EXPECT_EQ(*part.part_of(Point{0.5, 0.5}), 3u);
}

TEST(SectorPartition, SampledPartDiameterAtMostRadius) {
  for (const auto& norm : {kPlane, NormSpec::max_norm(2), NormSpec(2, 3.0), NormSpec::euclidean(3)}) {
    const double R = 0.37;
    const Point centre(norm.d(), 0.5);
    const auto part = ball_sector_partition(centre, R, norm);
    CounterRng rng(11);
    std::map<std::size_t, std::vector<Point>> by_part;
    while (by_part.size() < part.count() || std::min_element(by_part.begin(), by_part.end(), [](auto& a, auto& b) {
             return a.second.size() < b.second.size();
           })->second.size() < 20) {
      Point z(norm.d());
      for (auto& x : z) x = 0.5 + R * rng.uniform(-1.0, 1.0);
      if (auto s = part.part_of(z)) by_part[*s].push_back(z);
    }
    std::size_t checked = 0;
    while (checked < 10000) {
      const auto& pts = std::next(by_part.begin(), static_cast<long>(rng.below(by_part.size())))->second;
      const auto& a = pts[rng.below(pts.size())];
      const auto& b = pts[rng.below(pts.size())];
      ASSERT_LE(brute::distance(a, b, norm.p()), R + 1e-12) << norm.describe();
      ++checked;
    }
  }
}

namespace {

// One dense cell q (anchors) and labeled points from cells within r' of q.
struct CleanupFixture {
  PointSet pts{2};
  std::optional<Dissection> diss;
  GridId q = 0;
  std::vector<VertexId> anchors, labeled;
  double r = 0.3;

  CleanupFixture(std::uint64_t seed, std::size_t label_count) {
    const Dissection shape(PointSet(2), kPlane, 0.1, r, 1);
    q = *shape.id_of(std::vector<std::int64_t>{16, 16});
    const auto gq = shape.grid_point(q);
    CounterRng rng(seed);
    for (int k = 0; k < 10; ++k) pts.push_back({gq[0] + shape.spacing() * rng.uniform(), gq[1] + shape.spacing() * rng.uniform()});
    std::vector<GridId> near;
    shape.for_each_within(q, shape.r_prime(), [&](GridId p) {
      if (p != q) near.push_back(p);
    });
    for (std::size_t k = 0; k < label_count; ++k) {
      const auto gp = shape.grid_point(near[rng.below(near.size())]);
      pts.push_back({gp[0] + shape.spacing() * rng.uniform(), gp[1] + shape.spacing() * rng.uniform()});
    }
    diss.emplace(pts, kPlane, 0.1, r, 1);
    for (VertexId v = 0; v < 7; ++v) anchors.push_back(v);
    for (std::size_t k = 0; k < label_count; ++k) labeled.push_back(static_cast<VertexId>(10 + k));
  }

  SectorPartition partition() const { return ball_sector_partition(diss->grid_point(q), r, kPlane); }
};

}  // namespace

TEST(CleanupPath, NoLabelsGivesAnchors) {
  CleanupFixture f(1, 0);
  EXPECT_EQ(cleanup_path(f.pts, *f.diss, f.q, f.anchors, {}, f.partition()), f.anchors);
}

TEST(CleanupPath, OneSectorIsOneRun) {
  CleanupFixture f(2, 0);
  const auto gq = f.diss->grid_point(f.q);
  std::vector<VertexId> labeled;
  for (int k = 0; k < 4; ++k) {
    labeled.push_back(static_cast<VertexId>(f.pts.size()));
    f.pts.push_back({gq[0] + 0.1 + 0.01 * k, gq[1] + 0.01});
  }
  f.diss.emplace(f.pts, kPlane, 0.1, f.r, 1);
  const auto path = cleanup_path(f.pts, *f.diss, f.q, f.anchors, labeled, f.partition());
  std::vector<VertexId> expect{0};
  expect.insert(expect.end(), labeled.begin(), labeled.end());
  for (VertexId v = 1; v < 7; ++v) expect.push_back(v);
  EXPECT_EQ(path, expect);
}

TEST(CleanupPath, RandomInstancesValidate) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CleanupFixture f(seed + 10, 60);
    const auto path = cleanup_path(f.pts, *f.diss, f.q, f.anchors, f.labeled, f.partition());
    std::set<VertexId> expect(f.anchors.begin(), f.anchors.end());
    expect.insert(f.labeled.begin(), f.labeled.end());
    EXPECT_EQ(std::set<VertexId>(path.begin(), path.end()), expect);
    EXPECT_EQ(path.size(), expect.size());
    EXPECT_EQ(path.front(), f.anchors.front());
    EXPECT_EQ(path.back(), f.anchors.back());
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
      EXPECT_LE(brute::distance(f.pts.point(path[k]), f.pts.point(path[k + 1]), 2.0), f.r);
  }
}

TEST(CleanupPath, RejectsBadAnchors) {
  CleanupFixture f(3, 5);
  std::vector<VertexId> dup{0, 1, 1, 2, 3, 4, 5};
  EXPECT_THROW(cleanup_path(f.pts, *f.diss, f.q, dup, f.labeled, f.partition()), ContractViolation);
  std::vector<VertexId> outside{0, 1, 2, 3, 4, 5, 10};
  std::vector<VertexId> rest(f.labeled.begin() + 1, f.labeled.end());
  EXPECT_THROW(cleanup_path(f.pts, *f.diss, f.q, outside, rest, f.partition()), ContractViolation);
}
