#pragma once

#include <string>
#include <vector>

#include "sils/bootstrap.hpp"

namespace sils {

struct TestDiagnostics {
  std::uint64_t kernel_evals_stat = 0;
  std::uint64_t kernel_evals_jackknife = 0;
  int degenerate_cells = 0;  // (v,b) pairs whose pool holds fewer than r points
  std::vector<std::string> warnings;
};

struct TestResult {
  int n = 0, d = 0, r = 0;
  QueryGrid grid;
  std::vector<double> alpha_n;  // n / N_b per bandwidth
  StatTable stats;
  JackknifeTable jk;
  BootstrapRun boot;
  double sup_stat = 0.0;
  bool reject = false;
  TestDiagnostics diag;
};

// End-to-end pipeline: plans -> statistics -> jackknife -> bootstrap draws ->
// reject iff sup >= q#_alpha. Configuration errors throw; degenerate strata
// (empty or sub-r pools) run through with the 0-conventions and get flagged.
inline TestResult run_test(const Dataset& data, const TestConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
    throw ConfigError("level alpha must lie in (0,1)");
  const RunContext ctx = RunContext::build(data, cfg);

  TestResult res;
  res.n = ctx.n();
  res.d = ctx.d();
  res.r = ctx.r();
  res.grid = ctx.grid;
  for (int bi = 0; bi < ctx.nb(); ++bi) {
    const Budget& budget = ctx.budgets[bi];
    res.alpha_n.push_back(static_cast<double>(ctx.n()) / budget.n_target);
    if (budget.p_clamped)
      res.diag.warnings.push_back("bandwidth " + std::to_string(ctx.grid.bandwidths[bi]) +
                                  ": requested N exceeds C(n,r)/2, p clamped to 1/2");
    if (budget.q_clamped)
      res.diag.warnings.push_back("bandwidth " + std::to_string(ctx.grid.bandwidths[bi]) +
                                  ": requested N2 exceeds C(n-1,r-1), q clamped to 1");
  }

  res.stats = compute_statistics(ctx, cfg, stat_plans_from_rng(ctx, cfg));
  res.diag.kernel_evals_stat = res.stats.kernel_evals;
  for (const StatCell& c : res.stats.cells)
    if (c.degenerate_pool) ++res.diag.degenerate_cells;
  if (res.diag.degenerate_cells > 0)
    res.diag.warnings.push_back(std::to_string(res.diag.degenerate_cells) +
                                " (query, bandwidth) cells have fewer than r local points");

  res.jk = compute_jackknife(ctx, cfg, jk_plans_from_rng(ctx, cfg));
  res.diag.kernel_evals_jackknife = res.jk.kernel_evals;

  res.sup_stat = sup_statistic(res.stats, ctx.n());
  res.boot = run_bootstrap(res.jk, res.stats, res.alpha_n, ctx.r(), cfg, res.sup_stat);
  res.reject = res.sup_stat >= res.boot.q_alpha;
  return res;
}

}  // namespace sils
