#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sils/oracle.hpp"
#include "sils/simgen.hpp"

namespace sils {

// Self-checks behind the `verify` CLI subcommand: brute-force oracle
// equivalence for the incomplete machinery plus distributional sanity checks,
// all at fixture scale (seconds, not minutes).

struct VerifyLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyLine> lines;

  bool all_pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
};

// Frozen small instance: d=1, n=12, seed 7, affine regression, sigma = 0.2.
inline Scenario fixture_scenario() {
  Scenario sc;
  sc.id = "fixture-n12-d1";
  sc.d = 1;
  sc.n = 12;
  sc.seed = 7;
  sc.f.type = RegressionFn::Type::affine_poly;
  sc.f.kappa0 = 1.0;
  sc.noise.type = NoiseLaw::Type::gaussian;
  sc.noise.sigma = 0.2;
  return sc;
}

inline Dataset fixture_dataset() { return generate(fixture_scenario(), 0); }

// Test configuration used with the fixture: one query, unit bandwidth,
// absolute budgets small enough to enumerate against.
inline TestConfig fixture_config() {
  TestConfig cfg;
  cfg.bandwidths = {1.0};
  cfg.queries = {0.5};
  cfg.budget.n_abs = 30;
  cfg.budget.n2_abs = 20;
  cfg.bootstrap_draws = 400;
  cfg.alpha = 0.05;
  cfg.seed = 11;
  cfg.workers = 1;
  return cfg;
}

namespace detail {

inline VerifyLine check(const std::string& name, bool pass, const std::string& detail) {
  return VerifyLine{name, pass, detail};
}

inline std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

}  // namespace detail

// Replicate mean of U' over `reps` independent plan draws against the
// complete U-statistic, within 3 sigma of the Monte Carlo standard error.
inline VerifyLine verify_u_prime_equivalence(int reps = 2000) {
  const Dataset ds = fixture_dataset();
  const TestConfig cfg = fixture_config();
  const RunContext ctx = RunContext::build(ds, cfg);
  const double exact =
      complete_u(ds, ctx.grid.query(0), ctx.grid.bandwidths[0], cfg.variant, cfg.kernel);
  KahanSum s, s2;
  for (int t = 0; t < reps; ++t) {
    Philox g(cfg.seed, stream_id(StreamTag::noise, 0, 0, 1, t));
    const SamplingPlanDraw plan =
        draw_stratum_plan(ctx.budgets[0], ctx.pools[0], ctx.n(), ctx.r(), g, ctx.binom);
    const StatPlanSource src = [&](int, int, const Neighborhood&) { return plan; };
    const StatTable table = compute_statistics(ctx, cfg, src);
    s.add(table.at(0, 0).u_prime);
    s2.add(table.at(0, 0).u_prime * table.at(0, 0).u_prime);
  }
  const double mean = s.value() / reps;
  const double var = std::fmax(0.0, s2.value() / reps - mean * mean);
  const double se = std::sqrt(var / reps);
  const bool pass = std::fabs(mean - exact) <= 3.0 * se;
  return detail::check("u_prime replicate mean vs complete_u", pass,
                       "mean=" + detail::fmt(mean) + " exact=" + detail::fmt(exact) +
                           " se=" + detail::fmt(se));
}

// Same for the jackknife estimators G^(k) against complete projections,
// for every k in the fixture.
inline VerifyLine verify_jackknife_equivalence(int reps = 2000) {
  const Dataset ds = fixture_dataset();
  const TestConfig cfg = fixture_config();
  const RunContext ctx = RunContext::build(ds, cfg);
  int worst_k = -1;
  double worst_gap = 0.0;
  bool pass = true;
  for (int k = 0; k < ds.n(); ++k) {
    const double exact =
        complete_projection(ds, k, ctx.grid.query(0), ctx.grid.bandwidths[0], cfg.variant,
                            cfg.kernel);
    Neighborhood pool_minus_k;
    for (int i : ctx.pools[0].idx)
      if (i != k) pool_minus_k.idx.push_back(i);
    KahanSum s, s2;
    for (int t = 0; t < reps; ++t) {
      Philox g(cfg.seed, stream_id(StreamTag::noise, 0, 0, 2 + k, t));
      const SamplingPlanDraw plan =
          draw_jackknife_plan(ctx.budgets[0], pool_minus_k, ctx.n(), ctx.r(), g, ctx.binom);
      const LocalEvaluator ev(ds, cfg.kernel, cfg.variant, ctx.grid.query(0),
                              ctx.grid.bandwidths[0]);
      KahanSum hsum;
      for (std::uint64_t i = 0; i < plan.t1; ++i)
        hsum.add(ev.h_tuple(plan.tuples.data() + i * plan.arity, plan.arity, k));
      const double g_val = plan.n_hat > 0 ? hsum.value() / plan.n_hat : 0.0;
      s.add(g_val);
      s2.add(g_val * g_val);
    }
    const double mean = s.value() / reps;
    const double var = std::fmax(0.0, s2.value() / reps - mean * mean);
    const double se = std::sqrt(var / reps);
    const double gap = std::fabs(mean - exact);
    if (gap > 3.0 * se && gap > 1e-12) {
      pass = false;
      if (gap > worst_gap) {
        worst_gap = gap;
        worst_k = k;
      }
    }
  }
  return detail::check("jackknife replicate mean vs complete_projection", pass,
                       pass ? "all k within 3 sigma"
                            : "k=" + std::to_string(worst_k) + " off by " +
                                  detail::fmt(worst_gap));
}

// Conditional variance of the B-part: 10^4 bootstrap draws of the single-cell
// supremum with the A-part zeroed must have variance alpha_n * gamma_B within
// the chi-square 3 sigma band.
inline VerifyLine verify_bootstrap_variance(int draws = 10000) {
  const Dataset ds = fixture_dataset();
  const TestConfig cfg = fixture_config();
  const RunContext ctx = RunContext::build(ds, cfg);
  const StatTable stats = compute_statistics(ctx, cfg, stat_plans_from_rng(ctx, cfg));
  const double gamma = stats.at(0, 0).gamma_b;
  JackknifeTable jk;  // A-part identically zero
  jk.n = ds.n();
  jk.M = 1;
  jk.nb = 1;
  jk.g.assign(static_cast<std::size_t>(jk.n), 0.0);
  jk.g_bar.assign(1, 0.0);
  const double alpha_n = static_cast<double>(ds.n()) / ctx.budgets[0].n_target;
  std::vector<double> xi;
  KahanSum s, s2;
  for (int t = 0; t < draws; ++t) {
    const double v = bootstrap_draw(jk, stats, {alpha_n}, ctx.r(), cfg.seed, t, xi);
    s.add(v);
    s2.add(v * v);
  }
  const double mean = s.value() / draws;
  const double var = std::fmax(0.0, s2.value() / draws - mean * mean);
  const double target = alpha_n * gamma;
  const double band = 3.0 * target * std::sqrt(2.0 / (draws - 1));
  const bool pass = std::fabs(var - target) <= band;
  return detail::check("bootstrap B-part variance vs gamma_B", pass,
                       "var=" + detail::fmt(var) + " target=" + detail::fmt(target));
}

// Binomial sampler moment check against the exact big-integer mean.
inline VerifyLine verify_binomial_moments(int reps = 4000) {
  const BigCount trials = BigCount::binom(1000, 4) - BigCount::binom(150, 4);
  const double p = 1.5e-3;
  const double lambda = trials.to_double() * p;
  Philox g(3, stream_id(StreamTag::noise, 0, 0, 3, 0));
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) sum += static_cast<double>(sample_binomial(trials, p, g));
  const double mean = sum / reps;
  const double sd = std::sqrt(lambda * (1 - p) / reps);
  const bool pass = std::fabs(mean - lambda) <= 3.0 * sd;
  return detail::check("binomial sampler moments", pass,
                       "mean=" + detail::fmt(mean) + " lambda=" + detail::fmt(lambda));
}

// End-to-end determinism at fixture scale: same seed, 1 vs 4 workers.
inline VerifyLine verify_determinism() {
  const Dataset ds = fixture_dataset();
  TestConfig cfg = fixture_config();
  cfg.workers = 1;
  const TestResult a = run_test(ds, cfg);
  cfg.workers = 4;
  const TestResult b = run_test(ds, cfg);
  bool same = a.sup_stat == b.sup_stat && a.boot.q_alpha == b.boot.q_alpha &&
              a.boot.p_value == b.boot.p_value && a.reject == b.reject;
  for (std::size_t i = 0; same && i < a.boot.draws.size(); ++i)
    same = a.boot.draws[i] == b.boot.draws[i];
  return detail::check("worker-count invariance", same,
                       same ? "bit-identical" : "results differ across worker counts");
}

inline VerifyReport run_verification(const std::string& fixtures_dir = "") {
  VerifyReport rep;
  if (!fixtures_dir.empty()) {
    // Stored fixture must match regeneration byte for byte.
    const std::filesystem::path dir(fixtures_dir);
    std::ifstream in(dir / "dataset.csv");
    if (!in) {
      rep.lines.push_back(detail::check("fixture dataset present", false,
                                        (dir / "dataset.csv").string() + " missing"));
    } else {
      std::ostringstream stored;
      stored << in.rdbuf();
      std::ostringstream fresh;
      write_csv(fresh, fixture_dataset());
      rep.lines.push_back(detail::check("fixture dataset matches regeneration",
                                        stored.str() == fresh.str(),
                                        "dataset.csv"));
    }
  }
  rep.lines.push_back(verify_u_prime_equivalence());
  rep.lines.push_back(verify_jackknife_equivalence());
  rep.lines.push_back(verify_bootstrap_variance());
  rep.lines.push_back(verify_binomial_moments());
  rep.lines.push_back(verify_determinism());
  return rep;
}

inline void write_fixtures(const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "dataset.csv");
  if (!out) throw DataError("cannot write fixtures to '" + dir + "'");
  write_csv(out, fixture_dataset());
}

}  // namespace sils
