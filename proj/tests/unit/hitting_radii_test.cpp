#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "brute.hpp"
#include "rgg/hitting_radii.hpp"

using namespace rgg;

namespace {

const NormSpec kPlane = NormSpec::euclidean();

EdgeProcess triangle() { return build_edge_process(brute::triangle345(), kPlane); }
EdgeProcess square() { return build_edge_process(brute::square_corners(), kPlane); }

bool is_edge_length_or_zero(const EdgeProcess& proc, const Hitting& h) {
  if (h.rank < 0) return h.radius == 0.0;
  return proc.length(static_cast<std::size_t>(h.rank)) == h.radius;
}

}  // namespace

TEST(RhoProperty, HasAnEdge) {
  const auto proc = build_edge_process(sample_uniform_points(20, kPlane, 3), kPlane);
  const auto h = rho_property(proc, [](const GeometricGraph& g) { return g.edge_count() >= 1; });
  EXPECT_EQ(h->radius, proc.length(0));
}

TEST(RhoProperty, TriangleConnected) {
  EXPECT_DOUBLE_EQ(rho_property(triangle(), is_connected)->radius, 4.0);
}

TEST(RhoProperty, AlwaysTrue) {
  const auto h = rho_property(triangle(), [](const GeometricGraph&) { return true; });
  EXPECT_EQ(h->rank, -1);
  EXPECT_EQ(h->radius, 0.0);
}

TEST(RhoProperty, Unsatisfiable) {
  EXPECT_THROW(rho_property(triangle(), [](const GeometricGraph&) { return false; }), UnsatisfiableProperty);
}

TEST(RhoMinDegree, Triangle) {
  EXPECT_DOUBLE_EQ(rho_min_degree(triangle(), 1)->radius, 4.0);
  EXPECT_DOUBLE_EQ(rho_min_degree(triangle(), 2)->radius, 5.0);
  EXPECT_THROW(rho_min_degree(triangle(), 3), ContractViolation);
  EXPECT_THROW(rho_min_degree(triangle(), 0), ContractViolation);
}

TEST(RhoMinDegree, SquareCorners) { EXPECT_DOUBLE_EQ(rho_min_degree(square(), 2)->radius, 1.0); }

TEST(RhoMinDegree, RankIsEndOfTieGroup) {
  const auto h = rho_min_degree(square(), 2);
  EXPECT_EQ(h->rank, 3);
}

TEST(RhoMinDegree, ThreeRoutesAgree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 5 + seed % 46;
    const auto pts = sample_uniform_points(n, kPlane, seed);
    const auto proc = build_edge_process(pts, kPlane);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto scan = rho_min_degree(proc, k);
      const auto pred = rho_property(proc, [k](const GeometricGraph& g) { return min_degree(g) >= k; });
      double formula = 0.0;
      for (std::size_t i = 0; i < n; ++i) formula = std::max(formula, kth_nearest_distance(proc, i, k));
      EXPECT_EQ(scan, pred);
      EXPECT_EQ(scan->radius, formula);
      EXPECT_EQ(rho_min_degree_radius(pts, kPlane, k), formula);
      EXPECT_TRUE(is_edge_length_or_zero(proc, *scan));
    }
  }
}

TEST(RhoConnected, MatchesPredicate) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto proc = build_edge_process(sample_uniform_points(10 + seed, kPlane, seed), kPlane);
    EXPECT_EQ(rho_connected(proc), rho_property(proc, is_connected));
    EXPECT_EQ(rho_k_connected(proc, 1), rho_connected(proc));
  }
}

TEST(RhoKConnected, Examples) {
  EXPECT_DOUBLE_EQ(rho_k_connected(square(), 2)->radius, 1.0);
  EXPECT_DOUBLE_EQ(rho_k_connected(triangle(), 2)->radius, 5.0);
  EXPECT_THROW(rho_k_connected(triangle(), 3), ContractViolation);
}

TEST(RhoKConnected, OraclesAgree) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto proc = build_edge_process(sample_uniform_points(9, kPlane, 300 + seed), kPlane);
    for (int k = 2; k <= 3; ++k) {
      const auto fast = rho_k_connected(proc, k);
      const auto slow = rho_k_connected(proc, k, [](const GeometricGraph& g, int kk) { return brute::k_connected(g, kk); });
      EXPECT_EQ(fast, slow);
    }
  }
}

TEST(RhoHamiltonian, Examples) {
  EXPECT_DOUBLE_EQ(rho_hamiltonian_exact(triangle()).radius, 5.0);
  EXPECT_DOUBLE_EQ(rho_hamiltonian_exact(square()).radius, 1.0);
  PointSet line(2);
  line.push_back({0.0, 0.0});
  line.push_back({0.4, 0.0});
  line.push_back({1.0, 0.0});
  EXPECT_DOUBLE_EQ(rho_hamiltonian_exact(build_edge_process(line, kPlane)).radius, 1.0);
}

TEST(RhoHamiltonian, Ranges) {
  PointSet two(2);
  two.push_back({0.0, 0.0});
  two.push_back({1.0, 0.0});
  EXPECT_THROW(rho_hamiltonian_exact(build_edge_process(two, kPlane)), ContractViolation);
  const auto big = build_edge_process(sample_uniform_points(23, kPlane, 1), kPlane);
  EXPECT_THROW(rho_hamiltonian_exact(big), CapacityError);
}

TEST(RhoHamiltonian, HintDoesNotChangeAnswer) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto proc = build_edge_process(sample_uniform_points(8 + seed % 5, kPlane, 700 + seed), kPlane);
    const auto plain = rho_hamiltonian_exact(proc);
    const auto hinted = rho_hamiltonian_exact(proc, rho_k_connected(proc, 2));
    const auto brute_h = rho_property(proc, brute::hamiltonian);
    EXPECT_EQ(plain, hinted);
    EXPECT_EQ(plain, *brute_h);
  }
}

TEST(XStatistic, Values) {
  const double n = 20.0;
  const double r = std::sqrt((std::log(n) + std::log(std::log(n))) / (std::numbers::pi * n));
  EXPECT_NEAR(x_statistic(20, r), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(x_statistic(20, 0.0), -(std::log(20.0) + std::log(std::log(20.0))));
  const double r2 = 0.17;
  EXPECT_NEAR(x_statistic(20, r2), 20.0 * 3.141592653589793 * r2 * r2 - 2.995732273553991 - 1.0971887003649,
              1e-12);
  EXPECT_THROW(x_statistic(2, 0.1), ContractViolation);
}

TEST(HittingReport, ChainInequalities) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 6 + seed % 12;
    const auto pts = sample_uniform_points(n, kPlane, 40 + seed);
    ReportOptions opt;
    opt.exact_hamiltonian = true;
    opt.k_connected_max = 3;
    const auto rep = compute_hitting_report(pts, kPlane, opt);
    for (const auto& [k, h] : rep.rho_k_connected) EXPECT_LE(rep.rho_min_degree.at(k).rank, h.rank);
    EXPECT_LE(rep.rho_min_degree.at(1).rank, rep.rho_connected.rank);
    EXPECT_LE(rep.rho_connected.rank, rep.rho_hamiltonian->rank);
    EXPECT_LE(rep.rho_k_connected.at(2).rank, rep.rho_hamiltonian->rank);
    EXPECT_TRUE(std::isfinite(rep.x_statistic));
  }
}

TEST(HittingReport, TruncatedMatchesComplete) {
  const auto pts = sample_uniform_points(kMaxMaterializedVertices + 500, kPlane, 5);
  const auto rep = compute_hitting_report(pts, kPlane);
  // Compare against a generous truncated process evaluated directly.
  const auto proc = build_edge_process_within(pts, kPlane, 0.08);
  EXPECT_EQ(rep.rho_min_degree.at(2), *rho_min_degree(proc, 2));
  EXPECT_EQ(rep.rho_connected, *rho_connected(proc));
  EXPECT_EQ(rep.rho_k_connected.at(2), *rho_k_connected(proc, 2));
  EXPECT_EQ(rep.rho_min_degree.at(3).radius, rho_min_degree_radius(pts, kPlane, 3));
}
