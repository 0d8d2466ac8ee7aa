#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rgg/cycle_builder.hpp"
#include "rgg/errors.hpp"
#include "rgg/exact_oracles.hpp"
#include "rgg/geometry.hpp"
#include "rgg/hitting_radii.hpp"
#include "rgg/rng.hpp"

namespace rgg {

/// exp[-(sqrt(pi) + e^{-x/2}) e^{-x/2}], the limiting law of the x-statistic
/// at the min-degree-2 hitting radius in the unit square.
inline double limit_probability(double x) {
  require(std::isfinite(x), "limit_probability: x must be finite");
  const double e = std::exp(-x / 2.0);
  return std::exp(-(std::sqrt(std::numbers::pi) + e) * e);
}

/// Sup-norm distance between the empirical CDF of `samples` and `cdf`.
inline double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "ks_distance: samples must be nonempty");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double m = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;  // ties jump together
    const double f = cdf(s[i]);
    d = std::max({d, f - static_cast<double>(i) / m, static_cast<double>(j) / m - f});
    i = j;
  }
  return std::clamp(d, 0.0, 1.0);
}

enum class OracleMode {
  None,          // hitting radii only
  Exact,         // plus the exact Hamiltonicity radius
  Constructive,  // plus the builder at rho(2-connected)
  Both,
};

inline std::string to_string(OracleMode m) {
  switch (m) {
    case OracleMode::None: return "none";
    case OracleMode::Exact: return "exact";
    case OracleMode::Constructive: return "constructive";
    case OracleMode::Both: return "both";
  }
  return "none";
}

inline OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "none") return OracleMode::None;
  if (s == "exact") return OracleMode::Exact;
  if (s == "constructive") return OracleMode::Constructive;
  if (s == "both") return OracleMode::Both;
  throw ContractViolation("unknown oracle mode '" + s + "' (none, exact, constructive, both)");
}

inline double parse_norm_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && p > 1.0, "norm p must be a number above 1 or 'inf', got '" + s + "'");
  return p;
}

inline std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << std::setprecision(17) << p;
  return os.str();
}

struct TrialConfig {
  std::size_t n = 12;
  int d = 2;
  double p = 2.0;
  std::size_t trials = 100;
  std::uint64_t master_seed = 0;
  int k_max = 3;
  OracleMode oracle_mode = OracleMode::Exact;
  std::string profile = "desk";  // builder constants: desk or paper
  std::string output;
  unsigned workers = 1;
  /// When set, every trial uses these points instead of sampling (fixtures).
  std::optional<PointSet> fixed_points;

  NormSpec norm() const { return NormSpec(d, p); }

  BuilderConstants constants() const {
    const auto nm = norm();
    if (profile == "desk") return BuilderConstants::desk(nm);
    if (profile == "paper") return BuilderConstants::paper(nm);
    throw ContractViolation("unknown builder profile '" + profile + "' (desk, paper)");
  }

  bool exact() const { return oracle_mode == OracleMode::Exact || oracle_mode == OracleMode::Both; }
  bool constructive() const { return oracle_mode == OracleMode::Constructive || oracle_mode == OracleMode::Both; }

  void validate() const {
    require(n >= 3, "TrialConfig: n must be at least 3");
    require(trials >= 1, "TrialConfig: trials must be at least 1");
    require(k_max >= 2, "TrialConfig: k_max must be at least 2");
    require(workers >= 1, "TrialConfig: workers must be at least 1");
    (void)norm();
    (void)constants();
    if (exact())
      require(n <= kHamiltonianCeiling,
              "TrialConfig: exact mode needs n <= " + std::to_string(kHamiltonianCeiling));
    if (fixed_points) {
      require(fixed_points->size() == n && fixed_points->dim() == static_cast<std::size_t>(d),
              "TrialConfig: fixed points must match n and d");
      require(fixed_points->in_unit_cube(), "TrialConfig: fixed points must lie in the unit cube");
    }
  }
};

/// Overlays the fields present in `j` onto `cfg`. Unknown keys are errors.
inline void apply_json_config(TrialConfig& cfg, const nlohmann::json& j) {
  require(j.is_object(), "config: top level must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "n") cfg.n = v.get<std::size_t>();
      else if (key == "d") cfg.d = v.get<int>();
      else if (key == "p") cfg.p = v.is_string() ? parse_norm_p(v.get<std::string>()) : v.get<double>();
      else if (key == "trials") cfg.trials = v.get<std::size_t>();
      else if (key == "seed" || key == "master_seed") cfg.master_seed = v.get<std::uint64_t>();
      else if (key == "k_max") cfg.k_max = v.get<int>();
      else if (key == "oracle_mode") cfg.oracle_mode = parse_oracle_mode(v.get<std::string>());
      else if (key == "profile") cfg.profile = v.get<std::string>();
      else if (key == "output") cfg.output = v.get<std::string>();
      else if (key == "workers") cfg.workers = v.get<unsigned>();
      else throw ContractViolation("config: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ContractViolation("config: bad value for '" + key + "': " + e.what());
    }
  }
}

inline nlohmann::json config_to_json(const TrialConfig& cfg) {
  nlohmann::json j;
  j["n"] = cfg.n;
  j["d"] = cfg.d;
  if (std::isinf(cfg.p)) j["p"] = "inf";
  else j["p"] = cfg.p;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.master_seed;
  j["k_max"] = cfg.k_max;
  j["oracle_mode"] = to_string(cfg.oracle_mode);
  j["profile"] = cfg.profile;
  j["output"] = cfg.output;
  j["workers"] = cfg.workers;
  return j;
}

struct TrialRecord {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::vector<Hitting> rho_min_degree;  // k = 1 .. k_max
  Hitting rho_connected;
  Hitting rho_2_connected;
  std::optional<Hitting> rho_hamiltonian;
  bool hamiltonian_certified = false;  // rho_hamiltonian came from a verified built cycle
  std::optional<bool> md2_eq_2conn, twoconn_eq_ham, md2_eq_ham;
  double x_md2 = std::numeric_limits<double>::quiet_NaN();
  /// skipped, ok, fail:<stage>:<property>, or error:<kind> for a failed trial.
  std::string builder_status = "skipped";
  std::string error;

  bool failed() const { return !error.empty(); }
  const Hitting& md(int k) const { return rho_min_degree.at(static_cast<std::size_t>(k - 1)); }

  /// rho(md2) <= rho(2conn) <= rho(ham), on ranks and on radii.
  bool chain_holds() const {
    if (failed()) return true;
    if (md(2).rank > rho_2_connected.rank || md(2).radius > rho_2_connected.radius) return false;
    if (md(1).rank > rho_connected.rank || rho_connected.rank > rho_2_connected.rank) return false;
    if (rho_hamiltonian &&
        (rho_2_connected.rank > rho_hamiltonian->rank || rho_2_connected.radius > rho_hamiltonian->radius))
      return false;
    return true;
  }
};

struct FlagFrequency {
  std::size_t equal = 0, defined = 0;
  double value() const {
    return defined == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : static_cast<double>(equal) / static_cast<double>(defined);
  }
};

struct SummaryStats {
  std::size_t trials = 0;
  std::size_t failed = 0;
  std::size_t chain_violations = 0;
  FlagFrequency md2_eq_2conn, twoconn_eq_ham, md2_eq_ham;
  std::size_t builder_attempted = 0, builder_ok = 0;
  std::vector<double> x_sorted;  // empirical distribution of x at rho(md2)
  std::optional<double> ks_to_limit;
};

struct TrialRun {
  std::vector<TrialRecord> records;  // by trial index
  SummaryStats summary;
};

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

inline TrialRecord run_one_trial(const TrialConfig& cfg, std::size_t index) {
  TrialRecord rec;
  rec.trial_index = index;
  rec.seed = trial_seed(cfg.master_seed, index);
  try {
    const auto norm = cfg.norm();
    const PointSet points = cfg.fixed_points ? *cfg.fixed_points : sample_uniform_points(cfg.n, norm, rec.seed);
    ReportOptions opt;
    opt.k_max = cfg.k_max;
    opt.k_connected_max = 2;
    opt.exact_hamiltonian = cfg.exact();
    const auto rep = compute_hitting_report(points, norm, opt);
    for (int k = 1; k <= cfg.k_max; ++k) {
      const auto it = rep.rho_min_degree.find(k);
      if (it != rep.rho_min_degree.end()) rec.rho_min_degree.push_back(it->second);
    }
    require(rec.rho_min_degree.size() >= 2, "run_trials: k_max exceeds n - 1");
    rec.rho_connected = rep.rho_connected;
    rec.rho_2_connected = rep.rho_k_connected.at(2);
    rec.rho_hamiltonian = rep.rho_hamiltonian;
    rec.x_md2 = rep.x_statistic;
    if (cfg.constructive()) {
      const auto built = build_hamilton_cycle(points, norm, rec.rho_2_connected.radius, cfg.constants());
      if (built.ok) {
        rec.builder_status = "ok";
        // A verified Hamilton cycle at rho(2-connected) pins rho(ham) there.
        if (!rec.rho_hamiltonian) {
          rec.rho_hamiltonian = rec.rho_2_connected;
          rec.hamiltonian_certified = true;
        }
      } else {
        rec.builder_status = "fail:" + built.failure->stage + ":" + built.failure->property;
      }
    }
    rec.md2_eq_2conn = rec.md(2).rank == rec.rho_2_connected.rank;
    if (rec.rho_hamiltonian) {
      rec.twoconn_eq_ham = rec.rho_2_connected.rank == rec.rho_hamiltonian->rank;
      rec.md2_eq_ham = rec.md(2).rank == rec.rho_hamiltonian->rank;
    }
  } catch (const CapacityError& e) {
    rec.error = e.what();
    rec.builder_status = "error:capacity";
  } catch (const UnsatisfiableProperty& e) {
    rec.error = e.what();
    rec.builder_status = "error:unsatisfiable";
  } catch (const Error& e) {
    rec.error = e.what();
    rec.builder_status = "error:other";
  }
  return rec;
}

/// Folds records in index order, so the result does not depend on the order
/// in which trials finished.
inline SummaryStats summarize(const TrialConfig& cfg, std::span<const TrialRecord> records) {
  std::vector<const TrialRecord*> order;
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const TrialRecord* a, const TrialRecord* b) { return a->trial_index < b->trial_index; });
  SummaryStats s;
  auto tally = [](FlagFrequency& f, const std::optional<bool>& flag) {
    if (!flag) return;
    ++f.defined;
    f.equal += *flag;
  };
  for (const TrialRecord* r : order) {
    ++s.trials;
    if (r->failed()) {
      ++s.failed;
      continue;
    }
    s.chain_violations += !r->chain_holds();
    tally(s.md2_eq_2conn, r->md2_eq_2conn);
    tally(s.twoconn_eq_ham, r->twoconn_eq_ham);
    tally(s.md2_eq_ham, r->md2_eq_ham);
    if (r->builder_status != "skipped") {
      ++s.builder_attempted;
      s.builder_ok += r->builder_status == "ok";
    }
    if (std::isfinite(r->x_md2)) s.x_sorted.push_back(r->x_md2);
  }
  std::sort(s.x_sorted.begin(), s.x_sorted.end());
  if (cfg.norm().is_euclidean_plane() && !s.x_sorted.empty())
    s.ks_to_limit = ks_distance(s.x_sorted, limit_probability);
  return s;
}

/// Runs cfg.trials independent trials on cfg.workers threads. Trial i uses
/// seed derive_seed(master_seed, i) and lands in slot i, so the records do
/// not depend on the worker count.
inline TrialRun run_trials(const TrialConfig& cfg) {
  cfg.validate();
  TrialRun run;
  run.records.resize(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.trials; i = next++) run.records[i] = run_one_trial(cfg, i);
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, cfg.trials));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  run.summary = summarize(cfg, run.records);
  return run;
}

inline constexpr const char* kTrialsSchema = "rgg_trials/1";
inline constexpr const char* kTrialsHeader =
    "trial_index,seed,n,d,p,rho_md1,rho_md2,rho_conn,rho_2conn,rho_ham,flag_md2_eq_2conn,flag_2conn_eq_ham,"
    "flag_md2_eq_ham,x_md2,builder_status";

namespace detail {

inline std::string csv_real(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string csv_flag(const std::optional<bool>& f) { return f ? (*f ? "1" : "0") : ""; }

}  // namespace detail

/// One commented schema line, the header, then one row per trial. Missing
/// values (no Hamiltonicity oracle, failed trial) are empty fields.
inline void write_trials_csv(std::ostream& os, const TrialConfig& cfg, std::span<const TrialRecord> records) {
  os << "# schema: " << kTrialsSchema << '\n' << kTrialsHeader << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    const bool ok = !r.failed();
    os << r.trial_index << ',' << r.seed << ',' << cfg.n << ',' << cfg.d << ',' << format_p(cfg.p) << ','
       << detail::csv_real(ok ? r.md(1).radius : nan) << ',' << detail::csv_real(ok ? r.md(2).radius : nan) << ','
       << detail::csv_real(ok ? r.rho_connected.radius : nan) << ','
       << detail::csv_real(ok ? r.rho_2_connected.radius : nan) << ','
       << detail::csv_real(r.rho_hamiltonian ? r.rho_hamiltonian->radius : nan) << ','
       << detail::csv_flag(r.md2_eq_2conn) << ',' << detail::csv_flag(r.twoconn_eq_ham) << ','
       << detail::csv_flag(r.md2_eq_ham) << ',' << detail::csv_real(r.x_md2) << ',' << r.builder_status << '\n';
  }
}

inline nlohmann::json summary_to_json(const SummaryStats& s) {
  auto freq = [](const FlagFrequency& f) {
    nlohmann::json j{{"equal", f.equal}, {"defined", f.defined}};
    if (f.defined > 0) j["frequency"] = f.value();
    else j["frequency"] = nullptr;
    return j;
  };
  nlohmann::json j;
  j["trials"] = s.trials;
  j["failed"] = s.failed;
  j["chain_violations"] = s.chain_violations;
  j["md2_eq_2conn"] = freq(s.md2_eq_2conn);
  j["2conn_eq_ham"] = freq(s.twoconn_eq_ham);
  j["md2_eq_ham"] = freq(s.md2_eq_ham);
  j["builder"] = {{"attempted", s.builder_attempted}, {"ok", s.builder_ok}};
  j["x_samples"] = s.x_sorted.size();
  if (s.ks_to_limit) j["ks_to_limit"] = *s.ks_to_limit;
  else j["ks_to_limit"] = nullptr;
  return j;
}

}  // namespace rgg
