#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "brute.hpp"
#include "rgg/experiments.hpp"

using namespace rgg;

namespace {

// Inverse of the limit law: solve (sqrt(pi) + e) e = -ln u for e = e^{-x/2}.
double limit_quantile(double u) {
  const double c = -std::log(u), s = std::sqrt(std::numbers::pi);
  const double e = (-s + std::sqrt(s * s + 4.0 * c)) / 2.0;
  return -2.0 * std::log(e);
}

std::string csv_of(const TrialConfig& cfg) {
  const auto run = run_trials(cfg);
  std::ostringstream os;
  write_trials_csv(os, cfg, run.records);
  return os.str();
}

// Smallest pairwise distance at which `holds` is true, scanning every
// distinct distance of the point set.
template <class F>
double brute_radius(const PointSet& pts, F holds) {
  std::vector<double> cand{0.0};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) cand.push_back(NormSpec::euclidean().distance(pts[i], pts[j]));
  std::sort(cand.begin(), cand.end());
  for (double r : cand)
    if (holds(graph_at_radius(pts, NormSpec::euclidean(), r))) return r;
  return -1.0;
}

}  // namespace

TEST(LimitProbability, ClosedFormValues) {
  EXPECT_NEAR(limit_probability(0.0), std::exp(-(1.0 + std::sqrt(std::numbers::pi))), 1e-12);
  EXPECT_NEAR(limit_probability(0.0), 0.06251, 1e-5);
  EXPECT_NEAR(limit_probability(100.0), 1.0, 1e-20);
  EXPECT_LE(limit_probability(-50.0), 1e-300);
  EXPECT_THROW(limit_probability(std::numeric_limits<double>::infinity()), ContractViolation);
  EXPECT_THROW(limit_probability(std::nan("")), ContractViolation);
}

TEST(LimitProbability, StrictlyIncreasingInsideUnitInterval) {
  double prev = limit_probability(-6.0);
  for (int k = 1; k <= 1200; ++k) {
    const double v = limit_probability(-6.0 + 0.01 * k);
    ASSERT_LT(prev, v) << "at step " << k;
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    prev = v;
  }
}

TEST(LimitProbability, InverseRoundTrip) {
  for (double u : {0.01, 0.2, 0.5, 0.9, 0.999}) EXPECT_NEAR(limit_probability(limit_quantile(u)), u, 1e-12);
}

TEST(KsDistance, QuantileGridIsWithinOneOverLength) {
  const std::size_t m = 400;
  std::vector<double> xs;
  for (std::size_t i = 0; i < m; ++i) xs.push_back(limit_quantile((static_cast<double>(i) + 0.5) / m));
  EXPECT_LE(ks_distance(xs, limit_probability), 1.0 / m);
  std::vector<double> us;
  for (std::size_t i = 0; i < m; ++i) us.push_back((static_cast<double>(i) + 0.5) / m);
  EXPECT_NEAR(ks_distance(us, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5 / m, 1e-12);
}

TEST(KsDistance, ConstantSample) {
  const std::vector<double> xs(50, 0.5);
  const double d = ks_distance(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(d, 0.5, 1e-12);
  EXPECT_LE(d, 1.0);
}

TEST(KsDistance, UniformSamplesAgainstUniformCdf) {
  CounterRng rng(42);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = rng.uniform();
  EXPECT_LE(ks_distance(xs, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.03);
}

TEST(KsDistance, EmptyIsContractViolation) {
  EXPECT_THROW(ks_distance(std::vector<double>{}, limit_probability), ContractViolation);
}

TEST(RunTrials, TriangleFixture) {
  // Sides 0.3, 0.4, 0.5: min degree 1 and connectivity at 0.4, the rest at 0.5.
  PointSet pts(2);
  pts.push_back({0.1, 0.1});
  pts.push_back({0.4, 0.1});
  pts.push_back({0.4, 0.5});
  TrialConfig cfg;
  cfg.n = 3;
  cfg.trials = 1;
  cfg.fixed_points = pts;
  const auto run = run_trials(cfg);
  ASSERT_EQ(run.records.size(), 1u);
  const auto& r = run.records[0];
  ASSERT_FALSE(r.failed()) << r.error;
  EXPECT_NEAR(r.md(1).radius, 0.4, 1e-12);
  EXPECT_NEAR(r.rho_connected.radius, 0.4, 1e-12);
  EXPECT_NEAR(r.md(2).radius, 0.5, 1e-12);
  EXPECT_NEAR(r.rho_2_connected.radius, 0.5, 1e-12);
  ASSERT_TRUE(r.rho_hamiltonian.has_value());
  EXPECT_NEAR(r.rho_hamiltonian->radius, 0.5, 1e-12);
  EXPECT_EQ(r.md2_eq_2conn, true);
  EXPECT_EQ(r.twoconn_eq_ham, true);
  EXPECT_EQ(r.md2_eq_ham, true);
  EXPECT_EQ(r.builder_status, "skipped");
}

TEST(RunTrials, RadiiMatchBruteForceScan) {
  TrialConfig cfg;
  cfg.n = 8;
  cfg.trials = 30;
  cfg.master_seed = 11;
  const auto run = run_trials(cfg);
  for (const auto& r : run.records) {
    ASSERT_FALSE(r.failed());
    const auto pts = sample_uniform_points(cfg.n, cfg.norm(), r.seed);
    auto min_deg = [](std::size_t k) {
      return [k](const GeometricGraph& g) {
        for (VertexId v = 0; v < g.n(); ++v)
          if (g.degree(v) < k) return false;
        return true;
      };
    };
    EXPECT_EQ(r.md(1).radius, brute_radius(pts, min_deg(1)));
    EXPECT_EQ(r.md(2).radius, brute_radius(pts, min_deg(2)));
    EXPECT_EQ(r.rho_connected.radius, brute_radius(pts, [](const GeometricGraph& g) { return brute::k_connected(g, 1); }));
    EXPECT_EQ(r.rho_2_connected.radius,
              brute_radius(pts, [](const GeometricGraph& g) { return brute::k_connected(g, 2); }));
    EXPECT_EQ(r.rho_hamiltonian->radius, brute_radius(pts, [](const GeometricGraph& g) { return brute::hamiltonian(g); }));
  }
}

TEST(RunTrials, SeedsAreDerivedFromMasterAndIndex) {
  TrialConfig cfg;
  cfg.n = 6;
  cfg.trials = 5;
  cfg.master_seed = 99;
  const auto run = run_trials(cfg);
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    EXPECT_EQ(run.records[i].trial_index, i);
    EXPECT_EQ(run.records[i].seed, derive_seed(99, i));
  }
}

TEST(RunTrials, NoChainViolationsAtSixteen) {
  TrialConfig cfg;
  cfg.n = 16;
  cfg.trials = 500;
  cfg.master_seed = 3;
  cfg.workers = 4;
  const auto run = run_trials(cfg);
  EXPECT_EQ(run.summary.failed, 0u);
  EXPECT_EQ(run.summary.chain_violations, 0u);
  for (const auto& r : run.records) {
    ASSERT_TRUE(r.chain_holds());
    // md2 = ham forces both intermediate equalities.
    if (*r.md2_eq_ham) {
      EXPECT_TRUE(*r.md2_eq_2conn);
      EXPECT_TRUE(*r.twoconn_eq_ham);
    }
  }
}

TEST(RunTrials, CsvIsIdenticalAcrossRunsAndWorkerCounts) {
  TrialConfig cfg;
  cfg.n = 12;
  cfg.trials = 60;
  cfg.master_seed = 7;
  const auto a = csv_of(cfg);
  EXPECT_EQ(a, csv_of(cfg));
  cfg.workers = 4;
  EXPECT_EQ(a, csv_of(cfg));
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema: rgg_trials/1");
  std::getline(in, line);
  EXPECT_EQ(line, kTrialsHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 14);
  }
  EXPECT_EQ(rows, 60u);
}

TEST(RunTrials, SummaryIgnoresCompletionOrder) {
  TrialConfig cfg;
  cfg.n = 10;
  cfg.trials = 40;
  cfg.master_seed = 5;
  const auto run = run_trials(cfg);
  auto shuffled = run.records;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(1));
  const auto s = summarize(cfg, shuffled);
  EXPECT_EQ(summary_to_json(s), summary_to_json(run.summary));
  EXPECT_EQ(s.x_sorted, run.summary.x_sorted);
}

TEST(RunTrials, ConstructiveModeRecordsBuilderOutcome) {
  TrialConfig cfg;
  cfg.n = 40;
  cfg.trials = 4;
  cfg.oracle_mode = OracleMode::Constructive;
  const auto run = run_trials(cfg);
  EXPECT_EQ(run.summary.builder_attempted, 4u);
  for (const auto& r : run.records) {
    ASSERT_FALSE(r.failed());
    EXPECT_NE(r.builder_status, "skipped");
    // A Hamiltonicity radius is reported only when a built cycle certifies it.
    EXPECT_EQ(r.rho_hamiltonian.has_value(), r.builder_status == "ok");
  }
}

TEST(RunTrials, CapacityErrorBecomesFailedRecord) {
  TrialConfig cfg;
  cfg.n = kHamiltonianCeiling + 1;
  cfg.oracle_mode = OracleMode::Exact;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  const auto rec = run_one_trial(cfg, 0);
  EXPECT_TRUE(rec.failed());
  EXPECT_EQ(rec.builder_status, "error:capacity");
  std::ostringstream os;
  write_trials_csv(os, cfg, std::vector<TrialRecord>{rec});
  EXPECT_NE(os.str().find(",,,,,,,,,,error:capacity"), std::string::npos);
}

TEST(TrialConfigJson, OverlaysAndRejects) {
  TrialConfig cfg;
  apply_json_config(cfg, nlohmann::json::parse(R"({"n": 20, "p": "inf", "trials": 7, "seed": 5,
                                                   "oracle_mode": "none", "workers": 3})"));
  EXPECT_EQ(cfg.n, 20u);
  EXPECT_TRUE(std::isinf(cfg.p));
  EXPECT_EQ(cfg.trials, 7u);
  EXPECT_EQ(cfg.master_seed, 5u);
  EXPECT_EQ(cfg.oracle_mode, OracleMode::None);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_NO_THROW(cfg.validate());
  TrialConfig back;
  apply_json_config(back, config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"({"nn": 3})")), ContractViolation);
  EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"({"n": "x"})")), ContractViolation);
  EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"({"oracle_mode": "fast"})")), ContractViolation);
  EXPECT_THROW(parse_norm_p("1"), ContractViolation);
  EXPECT_THROW(parse_norm_p("2x"), ContractViolation);
}
