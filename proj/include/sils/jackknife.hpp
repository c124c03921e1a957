#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sils/statistic.hpp"

namespace sils {

// Incomplete jackknife estimators G^(k)(h_v) and their means, feeding the
// A-part of the multiplier bootstrap. Stored dense over k in [n] per
// (query, bandwidth) column; k outside the neighborhood stay structurally 0.
struct JackknifeTable {
  int n = 0, M = 0, nb = 0;
  std::vector<double> g;              // (m * nb + bi) * n + k
  std::vector<double> g_bar;          // m * nb + bi
  std::vector<std::uint64_t> n2_hat;  // same layout as g; 0 for skipped k
  std::uint64_t kernel_evals = 0;
  std::uint64_t explicit_tuples = 0;

  double g_at(int k, int m, int bi) const {
    return g[(static_cast<std::size_t>(m) * nb + bi) * n + k];
  }
  std::uint64_t n2_at(int k, int m, int bi) const {
    return n2_hat[(static_cast<std::size_t>(m) * nb + bi) * n + k];
  }
  const double* column(int m, int bi) const {
    return g.data() + (static_cast<std::size_t>(m) * nb + bi) * n;
  }
};

using JkPlanSource = std::function<SamplingPlanDraw(int k, int m, int bi,
                                                    const Neighborhood& pool_minus_k)>;

inline JkPlanSource jk_plans_from_rng(const RunContext& ctx, const TestConfig& cfg) {
  const std::uint64_t seed = cfg.seed;
  const RunContext* c = &ctx;
  return [c, seed](int k, int m, int bi, const Neighborhood& pool_minus_k) {
    Philox g(seed, stream_id(StreamTag::jk_plan, bi, m, k));
    return draw_jackknife_plan(c->budgets[bi], pool_minus_k, c->n(), c->r(), g, c->binom);
  };
}

// G^(k)(h_v) = sum over explicit (r-1)-tuples of h_v(X_{k u iota}) / N2-hat,
// 0/0 -> 0. Only k inside the (v,b)-neighborhood are visited: for any other k
// every tuple containing k has h = 0 regardless of N2-hat, so the draw is
// skipped and the cell left at zero.
inline JackknifeTable compute_jackknife(const RunContext& ctx, const TestConfig& cfg,
                                        const JkPlanSource& source) {
  JackknifeTable table;
  table.n = ctx.n();
  table.M = ctx.M();
  table.nb = ctx.nb();
  const std::size_t n_cols = static_cast<std::size_t>(table.M) * table.nb;
  table.g.assign(n_cols * table.n, 0.0);
  table.g_bar.assign(n_cols, 0.0);
  table.n2_hat.assign(n_cols * table.n, 0);

  // One evaluator per (m, bi), shared read-only across the k work items.
  std::vector<LocalEvaluator> evals;
  evals.reserve(n_cols);
  for (int m = 0; m < table.M; ++m)
    for (int bi = 0; bi < table.nb; ++bi)
      evals.emplace_back(*ctx.ds, cfg.kernel, cfg.variant, ctx.grid.query(m),
                         ctx.grid.bandwidths[bi]);

  struct Item {
    int m, bi, k;
  };
  std::vector<Item> items;
  for (int m = 0; m < table.M; ++m)
    for (int bi = 0; bi < table.nb; ++bi)
      for (int k : ctx.pools[ctx.cell(m, bi)].idx) items.push_back({m, bi, k});

  std::vector<std::uint64_t> item_evals(items.size(), 0);
  parallel_for(static_cast<std::int64_t>(items.size()), cfg.workers, [&](std::int64_t it) {
    const Item& item = items[it];
    const std::size_t col = static_cast<std::size_t>(item.m) * table.nb + item.bi;
    const Neighborhood& pool = ctx.pools[col];
    Neighborhood pool_minus_k;
    pool_minus_k.idx.reserve(pool.idx.size() - 1);
    for (int i : pool.idx)
      if (i != item.k) pool_minus_k.idx.push_back(i);
    const SamplingPlanDraw plan = source(item.k, item.m, item.bi, pool_minus_k);
    const LocalEvaluator& ev = evals[col];
    KahanSum s;
    const int arity = plan.arity;
    for (std::uint64_t i = 0; i < plan.t1; ++i)
      s.add(ev.h_tuple(plan.tuples.data() + i * arity, arity, item.k));
    const std::size_t slot = col * table.n + item.k;
    table.n2_hat[slot] = plan.n_hat;
    if (plan.n_hat > 0) table.g[slot] = s.value() / static_cast<double>(plan.n_hat);
    item_evals[it] = plan.t1;
  });
  for (std::uint64_t e : item_evals) {
    table.kernel_evals += e;
    table.explicit_tuples += e;
  }
  for (std::size_t col = 0; col < n_cols; ++col) {
    KahanSum s;
    const double* column = table.g.data() + col * table.n;
    for (int k = 0; k < table.n; ++k) s.add(column[k]);
    table.g_bar[col] = s.value() / static_cast<double>(table.n);
  }
  return table;
}

// Expected explicit-tuple counts: per (m, bi) cell, |pool| * q_b * C(|pool|-1, r-1),
// with the subset counts taken exactly. Drives progress reporting and the
// runtime-budget check.
struct JackknifeWorkEstimate {
  double total = 0.0;
  std::vector<double> per_cell;  // m * nb + bi
};

inline JackknifeWorkEstimate jackknife_work_estimate(const RunContext& ctx) {
  JackknifeWorkEstimate est;
  est.per_cell.resize(static_cast<std::size_t>(ctx.M()) * ctx.nb(), 0.0);
  for (int m = 0; m < ctx.M(); ++m)
    for (int bi = 0; bi < ctx.nb(); ++bi) {
      const int ps = ctx.pools[ctx.cell(m, bi)].size();
      if (ps < 1) continue;
      const double local =
          BigCount::binom(static_cast<std::uint64_t>(ps - 1), ctx.r() - 1).to_double();
      const double cell = static_cast<double>(ps) * ctx.budgets[bi].q * local;
      est.per_cell[ctx.cell(m, bi)] = cell;
      est.total += cell;
    }
  return est;
}

}  // namespace sils
