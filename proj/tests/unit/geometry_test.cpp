#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "brute.hpp"
#include "rgg/geometry.hpp"

using namespace rgg;

TEST(LpDistance, IdentityIsZero) {
  const Point a{0.3, 0.7};
  EXPECT_EQ(lp_distance(a, a, NormSpec::euclidean()), 0.0);
}

TEST(LpDistance, PythagoreanTriple) {
  EXPECT_DOUBLE_EQ(lp_distance(Point{0, 0}, Point{3, 4}, NormSpec::euclidean()), 5.0);
}

TEST(LpDistance, MaxNorm) {
  EXPECT_DOUBLE_EQ(lp_distance(Point{0, 0}, Point{3, 4}, NormSpec::max_norm()), 4.0);
}

TEST(LpDistance, DimensionMismatchThrows) {
  EXPECT_THROW(lp_distance(Point{0, 0, 0}, Point{1, 1, 1}, NormSpec::euclidean()), ContractViolation);
  EXPECT_THROW(lp_distance(Point{0, 0}, Point{1, 1, 1}, NormSpec::euclidean(3)), ContractViolation);
}

TEST(LpDistance, TriangleInequalityOnRandomTriples) {
  CounterRng rng(99);
  const double ps[] = {1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()};
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + static_cast<int>(rng.below(3));
    const NormSpec norm(d, ps[rng.below(4)]);
    Point a(d), b(d), c(d);
    for (int j = 0; j < d; ++j) {
      a[j] = rng.uniform();
      b[j] = rng.uniform();
      c[j] = rng.uniform();
    }
    EXPECT_LE(lp_distance(a, c, norm), lp_distance(a, b, norm) + lp_distance(b, c, norm) + 1e-12);
    EXPECT_DOUBLE_EQ(lp_distance(a, b, norm), lp_distance(b, a, norm));
  }
}

TEST(NormSpec, RejectsBadParameters) {
  EXPECT_THROW(NormSpec(1, 2.0), ContractViolation);
  EXPECT_THROW(NormSpec(2, 1.0), ContractViolation);
  EXPECT_DOUBLE_EQ(NormSpec(2, 2.0).diameter_factor(), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(NormSpec::max_norm(3).diameter_factor(), 1.0);
}

TEST(Sampling, Deterministic) {
  const auto a = sample_uniform_points(500, NormSpec::euclidean(), 17);
  const auto b = sample_uniform_points(500, NormSpec::euclidean(), 17);
  EXPECT_EQ(a.flat(), b.flat());
  const auto c = sample_uniform_points(500, NormSpec::euclidean(), 18);
  EXPECT_NE(a.flat(), c.flat());
}

TEST(Sampling, EmptyThrows) {
  EXPECT_THROW(sample_uniform_points(0, NormSpec::euclidean(), 1), EmptyInput);
}

TEST(Sampling, SinglePointInCube) {
  const auto pts = sample_uniform_points(1, NormSpec::euclidean(3), 5);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_TRUE(pts.in_unit_cube());
}

TEST(Sampling, CoordinateMeans) {
  const auto pts = sample_uniform_points(10000, NormSpec::euclidean(), 2024);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mx += pts[i][0];
    my += pts[i][1];
  }
  EXPECT_NEAR(mx / 10000.0, 0.5, 0.02);
  EXPECT_NEAR(my / 10000.0, 0.5, 0.02);
  EXPECT_TRUE(pts.in_unit_cube());
}

TEST(GridBuild, TwoCorners) {
  PointSet pts(2);
  pts.push_back({0.1, 0.1});
  pts.push_back({0.9, 0.9});
  const auto idx = grid_build(pts, 0.5);
  ASSERT_EQ(idx.bucket_count(), 2u);
  const std::int64_t k00[] = {0, 0}, k11[] = {1, 1};
  EXPECT_EQ(idx.bucket(k00).size(), 1u);
  EXPECT_EQ(idx.bucket(k11).size(), 1u);
}

TEST(GridBuild, IdenticalPointsShareBucket) {
  PointSet pts(2);
  for (int i = 0; i < 7; ++i) pts.push_back({0.4, 0.4});
  const auto idx = grid_build(pts, 0.1);
  ASSERT_EQ(idx.bucket_count(), 1u);
  EXPECT_EQ(idx.bucket_members(0).size(), 7u);
}

TEST(GridBuild, PartitionAndMembership) {
  const auto pts = sample_uniform_points(1000, NormSpec::euclidean(), 3);
  const auto idx = grid_build(pts, 0.1);
  std::vector<int> seen(pts.size(), 0);
  std::size_t total = 0;
  for (std::size_t b = 0; b < idx.bucket_count(); ++b) {
    const auto key = idx.bucket_key(b);
    for (auto v : idx.bucket_members(b)) {
      ++seen[v];
      ++total;
      for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(key[j], static_cast<std::int64_t>(std::floor(pts[v][j] / 0.1)));
    }
  }
  EXPECT_EQ(total, 1000u);
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(GridBuild, RejectsNonPositiveSide) {
  PointSet pts(2);
  pts.push_back({0.5, 0.5});
  EXPECT_THROW(grid_build(pts, 0.0), ContractViolation);
  EXPECT_THROW(grid_build(pts, -1.0), ContractViolation);
}

TEST(GridNeighbors, ZeroRadius) {
  const auto pts = sample_uniform_points(50, NormSpec::euclidean(), 8);
  const auto idx = grid_build(pts, 0.1);
  EXPECT_TRUE(grid_neighbors(idx, 0, 0.0, NormSpec::euclidean()).empty());
}

TEST(GridNeighbors, DiameterRadiusGivesEveryone) {
  const auto pts = sample_uniform_points(60, NormSpec::euclidean(), 8);
  const auto idx = grid_build(pts, 0.1);
  EXPECT_EQ(grid_neighbors(idx, 5, std::sqrt(2.0), NormSpec::euclidean()).size(), 59u);
}

TEST(GridNeighbors, MatchesBruteForce) {
  const double ps[] = {1.5, 2.0, std::numeric_limits<double>::infinity()};
  for (double p : ps) {
    for (int d = 2; d <= 3; ++d) {
      const NormSpec norm(d, p);
      const auto pts = sample_uniform_points(200, norm, 11 + d);
      for (double side : {0.05, 0.2, 0.7}) {
        const auto idx = grid_build(pts, side);
        for (std::size_t i = 0; i < pts.size(); ++i)
          EXPECT_EQ(grid_neighbors(idx, i, 0.2, norm), brute::neighbors(pts, i, 0.2, p));
      }
    }
  }
}

TEST(GridNeighbors, BadArguments) {
  const auto pts = sample_uniform_points(10, NormSpec::euclidean(), 1);
  const auto idx = grid_build(pts, 0.2);
  EXPECT_THROW(grid_neighbors(idx, 10, 0.1, NormSpec::euclidean()), ContractViolation);
  EXPECT_THROW(grid_neighbors(idx, 0, -0.1, NormSpec::euclidean()), ContractViolation);
}
