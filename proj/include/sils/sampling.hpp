#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "sils/bigcount.hpp"
#include "sils/errors.hpp"
#include "sils/localize.hpp"
#include "sils/rng.hpp"

namespace sils {

// Explicit rank sampling needs subset ranks that fit a machine word.
inline constexpr std::uint64_t kRankCap = 1ull << 62;

// Saturating table of C(i, k) for i <= n_max, k <= k_max. Values past kRankCap
// are pinned there; callers guard against sampling in that regime.
struct BinomTable {
  int n_max = 0, k_max = 0;
  std::vector<std::uint64_t> c;  // (k_max+1) rows of (n_max+1)

  BinomTable() = default;
  BinomTable(int n, int k) : n_max(n), k_max(k), c(static_cast<std::size_t>(k + 1) * (n + 1)) {
    for (int i = 0; i <= n; ++i) at(i, 0) = 1;
    for (int kk = 1; kk <= k; ++kk) {
      at(0, kk) = 0;
      for (int i = 1; i <= n; ++i) {
        const std::uint64_t a = at(i - 1, kk - 1);
        const std::uint64_t b = at(i - 1, kk);
        const std::uint64_t s = a + b;
        at(i, kk) = (s < a || s > kRankCap) ? kRankCap : s;
      }
    }
  }

  std::uint64_t& at(int i, int k) { return c[static_cast<std::size_t>(k) * (n_max + 1) + i]; }
  std::uint64_t operator()(int i, int k) const {
    if (k > k_max || i < 0) return 0;
    if (k < 0) return 0;
    if (i > n_max) return kRankCap;
    return c[static_cast<std::size_t>(k) * (n_max + 1) + i];
  }
};

// Combinatorial number system: rank -> ascending k-subset of [0, limit).
inline void unrank_subset(std::uint64_t rank, int k, int limit, const BinomTable& tab,
                          int* out) {
  for (int kk = k; kk >= 1; --kk) {
    // largest c in [kk-1, limit) with C(c, kk) <= rank
    int lo = kk - 1, hi = limit - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) >> 1;
      if (tab(mid, kk) <= rank)
        lo = mid;
      else
        hi = mid - 1;
    }
    out[kk - 1] = lo;
    rank -= tab(lo, kk);
    limit = lo;
  }
}

inline std::uint64_t rank_subset(const int* subset, int k, const BinomTable& tab) {
  std::uint64_t r = 0;
  for (int i = 0; i < k; ++i) r += tab(subset[i], i + 1);
  return r;
}

namespace detail {

// t distinct uniform ranks in [0, total), ascending. Batch draw + sort + dedup
// with top-up when the fill ratio is small; Floyd's method otherwise.
inline std::vector<std::uint64_t> sample_distinct_ranks(std::uint64_t total, std::uint64_t t,
                                                        Philox& g) {
  if (t > total) throw ConfigError("sample_distinct_ranks: requested more than available");
  std::vector<std::uint64_t> out;
  if (t == 0) return out;
  if (t == total) {
    out.resize(t);
    for (std::uint64_t i = 0; i < t; ++i) out[i] = i;
    return out;
  }
  if (2 * t > total) {
    // Floyd: uniform without replacement at O(t) draws even when t ~ total.
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(t) * 2);
    for (std::uint64_t j = total - t; j < total; ++j) {
      const std::uint64_t r = uniform_below(g, j + 1);
      seen.insert(seen.count(r) ? j : r);
    }
    out.assign(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  out.reserve(static_cast<std::size_t>(t) + 16);
  for (std::uint64_t i = 0; i < t; ++i) out.push_back(uniform_below(g, total));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  while (out.size() < t) {
    const std::uint64_t need = t - out.size();
    std::vector<std::uint64_t> extra;
    extra.reserve(need);
    for (std::uint64_t i = 0; i < need; ++i) extra.push_back(uniform_below(g, total));
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    std::vector<std::uint64_t> merged;
    merged.reserve(out.size() + extra.size());
    std::merge(out.begin(), out.end(), extra.begin(), extra.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    out.swap(merged);
  }
  return out;
}

}  // namespace detail

// One Bernoulli(p) draw per trial, reduced to its sum. Exact Binomial when the
// trial count fits the double mantissa; Poisson(p * trials) beyond that, with
// the mean formed in extended precision.
inline std::uint64_t sample_binomial(const BigCount& trials, double p, Philox& g) {
  if (!(p >= 0.0) || !(p <= 1.0)) throw ConfigError("sample_binomial: p outside [0,1]");
  if (trials.is_zero() || p == 0.0) return 0;
  if (p == 1.0) return trials.as_u64();
  if (trials.exact_in_double()) {
    std::binomial_distribution<long long> dist(static_cast<long long>(trials.as_u64()), p);
    return static_cast<std::uint64_t>(dist(g));
  }
  const double lambda = trials.scaled_by(p);
  std::poisson_distribution<long long> dist(lambda);
  return static_cast<std::uint64_t>(dist(g));
}

inline std::uint64_t sample_binomial(std::uint64_t trials, double p, Philox& g) {
  return sample_binomial(BigCount(trials), p, g);
}

// T distinct r-subsets of the pool, uniform without replacement, each returned
// as ascending data indices. Errors when T exceeds C(|pool|, r).
inline std::vector<std::uint32_t> sample_tuples_without_replacement(
    const Neighborhood& pool, int r, std::uint64_t t, Philox& g, const BinomTable& tab) {
  const int ps = pool.size();
  const std::uint64_t total = tab(ps, r);
  if (total >= kRankCap)
    throw ConfigError("sample_tuples_without_replacement: subset space too large to rank");
  if (t > total)
    throw ConfigError("sample_tuples_without_replacement: T exceeds available subsets");
  const auto ranks = detail::sample_distinct_ranks(total, t, g);
  std::vector<std::uint32_t> out;
  out.resize(static_cast<std::size_t>(t) * r);
  int local[kMaxR];
  for (std::uint64_t i = 0; i < t; ++i) {
    unrank_subset(ranks[i], r, ps, tab, local);
    for (int a = 0; a < r; ++a)
      out[i * r + a] = static_cast<std::uint32_t>(pool.idx[local[a]]);
  }
  return out;
}

// Computational budgets. N and N2 are per-stratum, per-bandwidth expected
// tuple counts; with exponents, N = c_n * n^kappa * b^{-dr} (and likewise N2).
struct BudgetSpec {
  double c_n = 250.0;  // 10 x 25
  double kappa = 1.0;
  double c_n2 = 1e4;
  double kappa2 = 0.0;
  double n_abs = 0.0;   // absolute overrides (take precedence when > 0)
  double n2_abs = 0.0;
  double p_override = 0.0;  // diagnostic forcing of the Bernoulli probabilities
  double q_override = 0.0;
};

struct Budget {
  double n_target = 0.0;
  double n2_target = 0.0;
  double p = 0.0;  // success prob for r-tuples, clamped to <= 1/2
  double q = 0.0;  // success prob for (r-1)-tuples, clamped to <= 1
  bool p_clamped = false;
  bool q_clamped = false;
  BigCount trials_r;   // C(n, r)
  BigCount trials_r1;  // C(n-1, r-1)
};

inline Budget make_budget(int n, int d, double b, const BudgetSpec& spec) {
  if (n < d + 2) throw ConfigError("make_budget: need n >= d+2");
  if (!(b > 0.0)) throw ConfigError("make_budget: bandwidth must be positive");
  const int r = d + 2;
  Budget out;
  const double scale = std::pow(b, -static_cast<double>(d) * r);
  out.n_target = spec.n_abs > 0.0
                     ? spec.n_abs
                     : std::round(spec.c_n * std::pow(n, spec.kappa) * scale);
  out.n2_target = spec.n2_abs > 0.0
                      ? spec.n2_abs
                      : std::round(spec.c_n2 * std::pow(n, spec.kappa2) * scale);
  out.trials_r = BigCount::binom(n, r);
  out.trials_r1 = BigCount::binom(n - 1, r - 1);
  if (spec.p_override > 0.0) {
    out.p = spec.p_override;
  } else {
    out.p = out.n_target / out.trials_r.to_double();
    if (out.p > 0.5) {
      out.p = 0.5;  // standing assumption p_n <= 1/2
      out.p_clamped = true;
    }
  }
  if (spec.q_override > 0.0) {
    out.q = spec.q_override;
  } else {
    out.q = out.n2_target / out.trials_r1.to_double();
    if (out.q > 1.0) {
      out.q = 1.0;
      out.q_clamped = true;
    }
  }
  return out;
}

// Realized sampling plan for one stratum: N-hat plus the explicit tuples drawn
// inside the local pool. Tuples outside the pool are never materialized; only
// their Binomial count enters N-hat (their kernel values vanish).
struct SamplingPlanDraw {
  std::uint64_t n_hat = 0;
  std::uint64_t t1 = 0;
  int arity = 0;                      // indices per tuple (r, or r-1 for jackknife)
  std::vector<std::uint32_t> tuples;  // t1 * arity ascending data indices
};

inline SamplingPlanDraw draw_stratum_plan(const Budget& budget, const Neighborhood& pool,
                                          int n, int r, Philox& g, const BinomTable& tab) {
  SamplingPlanDraw plan;
  plan.arity = r;
  const BigCount local = BigCount::binom(static_cast<std::uint64_t>(pool.size()), r);
  const std::uint64_t t1 = sample_binomial(local, budget.p, g);
  const std::uint64_t t2 = sample_binomial(budget.trials_r - local, budget.p, g);
  plan.t1 = t1;
  plan.n_hat = t1 + t2;
  plan.tuples = sample_tuples_without_replacement(pool, r, t1, g, tab);
  return plan;
}

// Jackknife analogue: (r-1)-subsets of pool \ {k}, Bernoulli(q) over all of
// I^{(k)}_{n-1,r-1}. The held-in index k is not stored in the tuples.
inline SamplingPlanDraw draw_jackknife_plan(const Budget& budget,
                                            const Neighborhood& pool_minus_k, int n, int r,
                                            Philox& g, const BinomTable& tab) {
  SamplingPlanDraw plan;
  plan.arity = r - 1;
  const BigCount local = BigCount::binom(static_cast<std::uint64_t>(pool_minus_k.size()), r - 1);
  const std::uint64_t t1 = sample_binomial(local, budget.q, g);
  const std::uint64_t t2 = sample_binomial(budget.trials_r1 - local, budget.q, g);
  plan.t1 = t1;
  plan.n_hat = t1 + t2;
  plan.tuples = sample_tuples_without_replacement(pool_minus_k, r - 1, t1, g, tab);
  return plan;
}

}  // namespace sils
