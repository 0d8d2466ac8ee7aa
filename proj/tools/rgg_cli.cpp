// Command-line front end: trial farm, builder, audit, limit curve, oracle checks.
// Exit codes: 0 success, 1 structured failure, 2 usage error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rgg/rgg.hpp"

namespace {

using namespace rgg;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  return f;
}

// Writes to `path`, or to stdout when it is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  auto f = open_out(path);
  write(f);
}

PointSet load_points(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read '" + path + "'");
  return read_points(f);
}

// Where the points of a single-instance command come from.
struct PointSource {
  std::string file;
  std::size_t n = 0;
  int d = 2;
  std::uint64_t seed = 0;
  bool planted = false;

  void add(CLI::App* app) {
    app->add_option("--points", file, "points file (one point per line)");
    app->add_option("--n", n, "sample n uniform points instead of reading a file");
    app->add_option("--d", d, "dimension of sampled points")->check(CLI::Range(2, 16));
    app->add_option("--seed", seed, "sampling seed");
    app->add_flag("--planted", planted, "use the planted-clique instance for --seed (d = 2)");
  }

  // Points plus the instance's own radius when it has one.
  std::pair<PointSet, std::optional<double>> load() const {
    const int given = !file.empty() + (n > 0) + planted;
    if (given != 1) throw UsageError("give exactly one of --points, --n, --planted");
    if (!file.empty()) return {load_points(file), std::nullopt};
    if (planted) {
      auto inst = planted_instance({}, seed);
      return {std::move(inst.points), inst.rho};
    }
    return {sample_uniform_points(n, NormSpec(d, 2.0), seed), std::nullopt};
  }
};

struct NormArgs {
  std::string p = "2";
  void add(CLI::App* app) { app->add_option("--p", p, "norm exponent, a number above 1 or inf"); }
  NormSpec make(std::size_t d) const { return NormSpec(static_cast<int>(d), parse_norm_p(p)); }
};

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string config, output, summary, mode, profile, p;
  std::optional<std::size_t> n, trials;
  std::optional<int> d, k_max;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

int run_simulate(const SimulateArgs& a) {
  TrialConfig cfg;
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw UsageError("cannot read '" + a.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    apply_json_config(cfg, j);
  }
  if (a.n) cfg.n = *a.n;
  if (a.d) cfg.d = *a.d;
  if (!a.p.empty()) cfg.p = parse_norm_p(a.p);
  if (a.trials) cfg.trials = *a.trials;
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.k_max) cfg.k_max = *a.k_max;
  if (!a.mode.empty()) cfg.oracle_mode = parse_oracle_mode(a.mode);
  if (!a.profile.empty()) cfg.profile = a.profile;
  if (a.workers) cfg.workers = *a.workers;
  if (!a.output.empty()) cfg.output = a.output;
  cfg.validate();

  const auto run = run_trials(cfg);
  emit(cfg.output, [&](std::ostream& os) { write_trials_csv(os, cfg, run.records); });
  const auto js = summary_to_json(run.summary);
  if (!a.summary.empty()) emit(a.summary, [&](std::ostream& os) { os << js.dump(2) << '\n'; });
  else if (!cfg.output.empty() && cfg.output != "-") std::cout << js.dump(2) << '\n';
  return run.summary.chain_violations == 0 ? kOk : kFailed;
}

// ---- build-cycle -----------------------------------------------------------

struct BuildArgs {
  PointSource src;
  NormArgs norm;
  std::optional<double> rho;
  std::string profile = "desk", output, diagnostics;
  std::optional<double> eta, r_ratio;
  bool pancyclic = false;
};

int run_build(const BuildArgs& a) {
  auto [points, own_rho] = a.src.load();
  const auto norm = a.norm.make(points.dim());
  const double rho = a.rho ? *a.rho : own_rho ? *own_rho : throw UsageError("--rho is required for this input");
  auto consts = a.profile == "paper" ? BuilderConstants::paper(norm)
              : a.profile == "desk"  ? BuilderConstants::desk(norm)
                                     : throw UsageError("--profile must be desk or paper");
  if (a.eta) consts.eta = *a.eta;
  if (a.r_ratio) consts.r_ratio = *a.r_ratio;

  nlohmann::json diag;
  diag["n"] = points.size();
  diag["rho"] = rho;
  int code = kOk;
  if (a.pancyclic) {
    std::size_t verified = 0;
    const auto rep = build_pancyclic_family(points, norm, rho, consts, [&](std::size_t len, std::span<const VertexId> c) {
      verified += verify_cycle_length(points, norm, rho, c, len).ok;
    });
    diag["complete"] = rep.complete;
    diag["produced"] = rep.produced;
    diag["verified"] = verified;
    diag["from_builder"] = rep.from_builder;
    diag["from_oracle"] = rep.from_oracle;
    diag["splices"] = rep.splices;
    diag["reemits"] = rep.reemits;
    if (rep.first_missing) diag["first_missing"] = *rep.first_missing;
    if (rep.failure)
      diag["failure"] = {{"stage", rep.failure->stage}, {"property", rep.failure->property},
                         {"witness", rep.failure->witness}};
    code = rep.complete && verified == rep.produced ? kOk : kFailed;
  } else {
    const auto res = build_hamilton_cycle(points, norm, rho, consts);
    diag["ok"] = res.ok;
    const auto& s = res.stats;
    diag["stats"] = {{"precheck_ran", s.precheck_ran},
                     {"giant_cells", s.giant_cells},
                     {"small_components", s.small_components},
                     {"escort_vertices", s.escort_vertices},
                     {"labeled", s.labeled},
                     {"tree_max_degree", s.tree_max_degree},
                     {"walk_steps", s.walk_steps},
                     {"r1_steps", s.r1_steps},
                     {"r2_steps", s.r2_steps},
                     {"r3_steps", s.r3_steps}};
    if (res.failure)
      diag["failure"] = {{"stage", res.failure->stage}, {"property", res.failure->property},
                         {"witness", res.failure->witness}};
    if (res.ok) {
      emit(a.output, [&](std::ostream& os) { write_cycle(os, res.cycle); });
    } else {
      code = kFailed;
    }
  }
  if (!a.diagnostics.empty()) emit(a.diagnostics, [&](std::ostream& os) { os << diag.dump(2) << '\n'; });
  else if (code != kOk || (!a.output.empty() && a.output != "-") || a.pancyclic) std::cerr << diag.dump(2) << '\n';
  return code;
}

// ---- verify-cycle ----------------------------------------------------------

struct VerifyArgs {
  std::string points, cycle;
  NormArgs norm;
  double rho = 0.0;
};

int run_verify(const VerifyArgs& a) {
  const auto pts = load_points(a.points);
  std::ifstream f(a.cycle);
  if (!f) throw UsageError("cannot read '" + a.cycle + "'");
  const auto cycle = read_cycle(f);
  const auto check = verify_cycle(pts, a.norm.make(pts.dim()), a.rho, cycle);
  std::cout << (check.ok ? "ok" : "invalid: " + check.message) << '\n';
  return check.ok ? kOk : kFailed;
}

// ---- audit -----------------------------------------------------------------

struct AuditArgs {
  PointSource src;
  NormArgs norm;
  double r = 0.0, eta = 0.1;
  std::size_t K = 35;
  std::string constants = "desk", output;
};

int run_audit(const AuditArgs& a) {
  auto [points, own_rho] = a.src.load();
  (void)own_rho;
  const auto norm = a.norm.make(points.dim());
  const auto c = a.constants == "desk"    ? AuditConstants::desk()
               : a.constants == "paper" ? AuditConstants::paper()
                                        : throw UsageError("--constants must be desk or paper");
  const auto diss = build_dissection(points, norm, a.eta, a.r, a.K);
  auto sg = classify_and_extract(diss);
  const auto audit = audit_properties(sg, diss, c);
  emit(a.output, [&](std::ostream& os) { os << audit_csv(audit); });
  return audit.all_pass() ? kOk : kFailed;
}

// ---- limit-curve -----------------------------------------------------------

struct CurveArgs {
  double from = -6.0, to = 6.0, step = 0.5;
  std::string output;
};

int run_curve(const CurveArgs& a) {
  if (!(a.step > 0.0) || !(a.to >= a.from)) throw UsageError("need --step > 0 and --to >= --from");
  const auto rows = static_cast<std::size_t>(std::floor((a.to - a.from) / a.step + 1e-9)) + 1;
  emit(a.output, [&](std::ostream& os) {
    os << "x,probability\n" << std::setprecision(17);
    for (std::size_t k = 0; k < rows; ++k) {
      const double x = a.from + static_cast<double>(k) * a.step;
      os << x << ',' << limit_probability(x) << '\n';
    }
  });
  return kOk;
}

// ---- oracle-check ----------------------------------------------------------

struct OracleArgs {
  std::size_t instances = 200, n_max = 9;
  std::uint64_t seed = 1;
};

int run_oracle_check(const OracleArgs& a) {
  if (a.n_max < 3 || a.n_max > 10) throw UsageError("--n-max must lie in [3, 10]");
  const auto norm = NormSpec::euclidean(2);
  std::size_t ham_mismatch = 0, conn_mismatch = 0;
  for (std::size_t i = 0; i < a.instances; ++i) {
    const std::uint64_t s = derive_seed(a.seed, i);
    const std::size_t n = 3 + static_cast<std::size_t>(CounterRng(s).at(0) % (a.n_max - 2));
    const auto pts = sample_uniform_points(n, norm, s);
    const double rho = 0.2 + 0.6 * CounterRng::to_unit(CounterRng(s).at(1));
    const auto g = graph_at_radius(pts, norm, rho);
    ham_mismatch += is_hamiltonian_exact(g).hamiltonian != reference::hamiltonian_by_permutations(g);
    for (int k = 1; k <= 3 && static_cast<std::size_t>(k) < n; ++k)
      conn_mismatch += vertex_connectivity_at_least(g, k) != reference::k_connected_by_removal(g, k);
    conn_mismatch += is_biconnected(g) != reference::k_connected_by_removal(g, 2);
  }
  std::cout << "check,instances,mismatches\n"
            << "hamiltonian," << a.instances << ',' << ham_mismatch << '\n'
            << "connectivity," << a.instances << ',' << conn_mismatch << '\n';
  return ham_mismatch + conn_mismatch == 0 ? kOk : kFailed;
}

// ---- generate-points -------------------------------------------------------

struct GenerateArgs {
  PointSource src;
  std::string output;
};

int run_generate(const GenerateArgs& a) {
  const auto points = a.src.load().first;
  emit(a.output, [&](std::ostream& os) { write_points(os, points); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random geometric graph hitting radii and Hamilton cycle construction"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run seeded trials and write one CSV row per trial");
  s->add_option("--config", sim.config, "JSON config; flags override its fields");
  s->add_option("--n", sim.n, "points per trial");
  s->add_option("--d", sim.d, "dimension");
  s->add_option("--p", sim.p, "norm exponent, a number above 1 or inf");
  s->add_option("--trials", sim.trials, "number of trials");
  s->add_option("--seed", sim.seed, "master seed");
  s->add_option("--k-max", sim.k_max, "largest min-degree k");
  s->add_option("--mode", sim.mode, "none, exact, constructive or both");
  s->add_option("--profile", sim.profile, "builder constants: desk or paper");
  s->add_option("--workers", sim.workers, "worker threads (does not change the output)");
  s->add_option("--output", sim.output, "CSV path (default stdout)");
  s->add_option("--summary", sim.summary, "summary JSON path");

  BuildArgs build;
  auto* b = app.add_subcommand("build-cycle", "construct and verify a Hamilton cycle");
  build.src.add(b);
  build.norm.add(b);
  b->add_option("--rho", build.rho, "threshold (defaults to the planted instance's)");
  b->add_option("--profile", build.profile, "builder constants: desk or paper");
  b->add_option("--eta", build.eta, "cell side over r");
  b->add_option("--r-ratio", build.r_ratio, "dissection scale r over rho, in [0.5, 1]");
  b->add_option("--output", build.output, "cycle file, one vertex id per line (default stdout)");
  b->add_option("--diagnostics", build.diagnostics, "diagnostics JSON path");
  b->add_flag("--pancyclic", build.pancyclic, "build and verify cycles of every length instead");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify-cycle", "check a cycle file against a points file");
  v->add_option("--points", ver.points, "points file")->required();
  v->add_option("--cycle", ver.cycle, "cycle file")->required();
  v->add_option("--rho", ver.rho, "threshold")->required();
  ver.norm.add(v);

  AuditArgs aud;
  auto* au = app.add_subcommand("audit", "audit the structural properties of a dissection");
  aud.src.add(au);
  aud.norm.add(au);
  au->add_option("--r", aud.r, "dissection scale")->required();
  au->add_option("--eta", aud.eta, "cell side over r");
  au->add_option("--K", aud.K, "density threshold");
  au->add_option("--constants", aud.constants, "audit constants: desk or paper");
  au->add_option("--output", aud.output, "verdict CSV path (default stdout)");

  CurveArgs curve;
  auto* lc = app.add_subcommand("limit-curve", "tabulate the limiting law of the x-statistic");
  lc->add_option("--from", curve.from, "first x");
  lc->add_option("--to", curve.to, "last x");
  lc->add_option("--step", curve.step, "grid step");
  lc->add_option("--output", curve.output, "CSV path (default stdout)");

  OracleArgs orc;
  auto* oc = app.add_subcommand("oracle-check", "cross-check the exact oracles on small random instances");
  oc->add_option("--instances", orc.instances, "number of instances");
  oc->add_option("--n-max", orc.n_max, "largest instance size (at most 10)");
  oc->add_option("--seed", orc.seed, "master seed");

  GenerateArgs gen;
  auto* gp = app.add_subcommand("generate-points", "write sampled or planted points to a file");
  gen.src.add(gp);
  gp->add_option("--output", gen.output, "points path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return run_simulate(sim);
    if (*b) return run_build(build);
    if (*v) return run_verify(ver);
    if (*au) return run_audit(aud);
    if (*lc) return run_curve(curve);
    if (*oc) return run_oracle_check(orc);
    if (*gp) return run_generate(gen);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const EmptyInput& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
