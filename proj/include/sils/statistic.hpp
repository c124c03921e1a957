#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "sils/config.hpp"
#include "sils/parallel.hpp"
#include "sils/sampling.hpp"

namespace sils {

// Compensated (Kahan) accumulator; the gamma_B formula subtracts two large
// sums, so the partial sums are kept tight.
struct KahanSum {
  double s = 0.0, c = 0.0;

  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// Per-(query, bandwidth) evaluation context: open-box support flags for the
// uniform kernel plus its constant weight b^{d/2 - dr}.
struct LocalEvaluator {
  const Dataset* ds = nullptr;
  const Kernel* kernel = nullptr;
  KernelVariant variant = KernelVariant::identity;
  const double* v = nullptr;
  double b = 0.0;
  int d = 0, r = 0;
  bool uniform = true;
  double cw = 0.0;
  std::vector<std::uint8_t> open;  // per data index: strictly inside the open box

  LocalEvaluator() = default;
  LocalEvaluator(const Dataset& data, const Kernel& k, KernelVariant var, const double* vq,
                 double bw)
      : ds(&data), kernel(&k), variant(var), v(vq), b(bw), d(data.d), r(data.d + 2),
        uniform(k.is_uniform()),
        cw(std::pow(bw, 0.5 * data.d - static_cast<double>(data.d) * (data.d + 2))),
        open(data.n()) {
    const double half = 0.5 * bw;
    for (int i = 0; i < data.n(); ++i) {
      const double* p = data.point(i);
      bool ok = true;
      for (int c = 0; c < d; ++c)
        if (!(std::fabs(p[c] - vq[c]) < half)) {
          ok = false;
          break;
        }
      open[i] = ok ? 1 : 0;
    }
  }

  // h_v over the tuple of data indices; extra >= 0 appends a held-in index
  // (jackknife). Zero as soon as any point leaves the kernel support.
  double h_tuple(const std::uint32_t* idx, int arity, int extra = -1) const {
    double pts[kMaxR * kMaxDim];
    double ys[kMaxR];
    int count = 0;
    if (uniform) {
      for (int a = 0; a < arity; ++a)
        if (!open[idx[a]]) return 0.0;
      if (extra >= 0 && !open[extra]) return 0.0;
    }
    for (int a = 0; a < arity; ++a, ++count) {
      const double* p = ds->point(static_cast<int>(idx[a]));
      for (int c = 0; c < d; ++c) pts[count * d + c] = p[c];
      ys[count] = ds->y[idx[a]];
    }
    if (extra >= 0) {
      const double* p = ds->point(extra);
      for (int c = 0; c < d; ++c) pts[count * d + c] = p[c];
      ys[count] = ds->y[extra];
      ++count;
    }
    if (uniform) {
      const double w = (variant == KernelVariant::identity)
                           ? w_identity(pts, ys, d)
                           : static_cast<double>(w_sign(pts, ys, d));
      return w * cw;
    }
    return h_value(variant, *kernel, v, pts, ys, count, d, b);
  }
};

// Shared per-run precomputation: resolved grid, per-bandwidth budgets,
// neighborhoods for every (stratum, bandwidth) pair.
struct RunContext {
  const Dataset* ds = nullptr;
  QueryGrid grid;
  std::vector<Budget> budgets;      // per bandwidth
  BinomTable binom;                 // up to n choose r
  std::vector<Neighborhood> pools;  // m * nb + bi

  int n() const { return ds->n(); }
  int d() const { return ds->d; }
  int r() const { return ds->d + 2; }
  int M() const { return grid.size(); }
  int nb() const { return static_cast<int>(grid.bandwidths.size()); }
  int cell(int m, int bi) const { return m * nb() + bi; }

  static RunContext build(const Dataset& data, const TestConfig& cfg) {
    if (data.d < 1 || data.d > kMaxDim)
      throw ConfigError("dimension d must be in [1, " + std::to_string(kMaxDim) + "]");
    const int r = data.d + 2;
    if (data.n() < r)
      throw ConfigError("need at least r = d+2 = " + std::to_string(r) + " observations, got " +
                        std::to_string(data.n()));
    if (cfg.bandwidths.empty()) throw ConfigError("bandwidth set is empty");
    for (double b : cfg.bandwidths)
      if (!(b > 0.0)) throw ConfigError("bandwidths must be positive");
    RunContext ctx;
    ctx.ds = &data;
    ctx.grid.d = data.d;
    ctx.grid.bandwidths = cfg.bandwidths;
    ctx.grid.pts = cfg.queries.empty() ? default_query_points(data.d) : cfg.queries;
    if (ctx.grid.pts.size() % data.d != 0)
      throw ConfigError("query point list length must be a multiple of d");
    if (ctx.grid.size() < 1) throw ConfigError("query grid is empty");
    for (int a = 0; a < ctx.grid.size(); ++a)
      for (int b = a + 1; b < ctx.grid.size(); ++b) {
        bool same = true;
        for (int c = 0; c < data.d; ++c)
          if (ctx.grid.query(a)[c] != ctx.grid.query(b)[c]) {
            same = false;
            break;
          }
        if (same) throw ConfigError("query points must be pairwise distinct");
      }
    BudgetSpec spec = cfg.budget;
    if (spec.c_n2 == 0.0) spec.c_n2 = (data.d >= 4) ? 2e4 : 1e4;
    for (double b : cfg.bandwidths) ctx.budgets.push_back(make_budget(data.n(), data.d, b, spec));
    ctx.binom = BinomTable(data.n(), r);
    const CoordIndex ix = build_coord_index(data);
    ctx.pools.resize(static_cast<std::size_t>(ctx.M()) * ctx.nb());
    for (int m = 0; m < ctx.M(); ++m)
      for (int bi = 0; bi < ctx.nb(); ++bi)
        ctx.pools[ctx.cell(m, bi)] =
            neighborhood(data, ix, ctx.grid.query(m), ctx.grid.bandwidths[bi]);
    return ctx;
  }
};

struct StatCell {
  double u_prime = 0.0;
  double gamma_b = 0.0;
  std::uint64_t n_hat = 0;
  std::uint64_t t1 = 0;
  std::uint32_t pool_size = 0;
  bool degenerate_pool = false;  // fewer than r points share the b-box
};

struct StatTable {
  int M = 0, nb = 0;
  std::vector<StatCell> cells;  // m * nb + bi
  std::uint64_t kernel_evals = 0;

  const StatCell& at(int m, int bi) const { return cells[static_cast<std::size_t>(m) * nb + bi]; }
};

using StatPlanSource =
    std::function<SamplingPlanDraw(int m, int bi, const Neighborhood& pool)>;

inline StatPlanSource stat_plans_from_rng(const RunContext& ctx, const TestConfig& cfg) {
  const std::uint64_t seed = cfg.seed;
  const RunContext* c = &ctx;
  return [c, seed](int m, int bi, const Neighborhood& pool) {
    Philox g(seed, stream_id(StreamTag::stat_plan, bi, m));
    return draw_stratum_plan(c->budgets[bi], pool, c->n(), c->r(), g, c->binom);
  };
}

// Algorithm "statistic + gamma_B" over all (query, bandwidth) cells:
// U' = sum_explicit h / N-hat, gamma_B = sum h^2 / N-hat - U'^2, with the
// 0/0 -> 0 convention and gamma clamped at zero against round-off.
inline StatTable compute_statistics(const RunContext& ctx, const TestConfig& cfg,
                                    const StatPlanSource& source) {
  StatTable table;
  table.M = ctx.M();
  table.nb = ctx.nb();
  const std::size_t n_cells = static_cast<std::size_t>(table.M) * table.nb;
  table.cells.resize(n_cells);
  std::vector<std::uint64_t> evals(n_cells, 0);
  parallel_for(static_cast<std::int64_t>(n_cells), cfg.workers, [&](std::int64_t cell) {
    const int m = static_cast<int>(cell) / table.nb;
    const int bi = static_cast<int>(cell) % table.nb;
    const Neighborhood& pool = ctx.pools[cell];
    const LocalEvaluator ev(*ctx.ds, cfg.kernel, cfg.variant, ctx.grid.query(m),
                            ctx.grid.bandwidths[bi]);
    const SamplingPlanDraw plan = source(m, bi, pool);
    KahanSum s, s2;
    const int arity = plan.arity;
    for (std::uint64_t i = 0; i < plan.t1; ++i) {
      const double h = ev.h_tuple(plan.tuples.data() + i * arity, arity);
      s.add(h);
      s2.add(h * h);
    }
    StatCell out;
    out.n_hat = plan.n_hat;
    out.t1 = plan.t1;
    out.pool_size = static_cast<std::uint32_t>(pool.size());
    out.degenerate_pool = pool.size() < ctx.r();
    if (plan.n_hat > 0) {
      const double inv = 1.0 / static_cast<double>(plan.n_hat);
      out.u_prime = s.value() * inv;
      out.gamma_b = s2.value() * inv - out.u_prime * out.u_prime;
      if (out.gamma_b < 0.0) out.gamma_b = 0.0;
    }
    table.cells[cell] = out;
    evals[cell] = plan.t1;
  });
  for (std::uint64_t e : evals) table.kernel_evals += e;
  return table;
}

// sup over (v, b) of sqrt(n) * U'.
inline double sup_statistic(const StatTable& table, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (const StatCell& c : table.cells) best = std::fmax(best, c.u_prime);
  return std::sqrt(static_cast<double>(n)) * best;
}

}  // namespace sils
