#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "sils/sampling.hpp"

using namespace sils;

namespace {

Neighborhood pool_of(int count, int offset = 0) {
  Neighborhood nd;
  for (int i = 0; i < count; ++i) nd.idx.push_back(offset + i);
  return nd;
}

}  // namespace

TEST_CASE("BigCount: exact binomial coefficients and ratios", "[sampling]") {
  CHECK(BigCount::binom(12, 3).as_u64() == 220);
  CHECK(BigCount::binom(20, 4).as_u64() == 4845);
  CHECK(BigCount::binom(1000, 4).str() == "41417124750");
  CHECK(BigCount::ratio(BigCount::binom(6, 3), BigCount::binom(12, 3)) ==
        Catch::Approx(20.0 / 220.0));
  // C(10^4, 6) needs more than 64 bits
  const BigCount huge = BigCount::binom(10000, 6);
  CHECK_FALSE(huge.exact_in_double());
  CHECK(huge.str() == "1386806735798649165000");
}

TEST_CASE("sample_binomial: degenerate probabilities", "[sampling]") {
  Philox g(1, 2);
  CHECK(sample_binomial(BigCount(10), 0.0, g) == 0);
  CHECK(sample_binomial(BigCount(10), 1.0, g) == 10);
  CHECK_THROWS_AS(sample_binomial(BigCount(10), 1.5, g), ConfigError);
  CHECK_THROWS_AS(sample_binomial(BigCount(10), -0.1, g), ConfigError);
}

TEST_CASE("sample_binomial: moments match exact big-integer mean", "[sampling][slow]") {
  // trials = C(1000,4) - C(150,4), p = 1.5e-3
  const BigCount trials = BigCount::binom(1000, 4) - BigCount::binom(150, 4);
  const double p = 1.5e-3;
  const double lambda = trials.to_double() * p;
  const int reps = 10000;
  Philox g(77, stream_id(StreamTag::noise, 0, 0, 0, 2));
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) sum += static_cast<double>(sample_binomial(trials, p, g));
  const double mean = sum / reps;
  const double sd_mean = std::sqrt(lambda * (1.0 - p) / reps);
  CHECK(std::fabs(mean - lambda) <= 3.0 * sd_mean);
}

TEST_CASE("sample_binomial: Poisson path for trials beyond 2^53", "[sampling]") {
  const BigCount trials = BigCount::binom(3000, 6);  // ~ 1.1e18
  REQUIRE_FALSE(trials.exact_in_double());
  const double p = 1e-12;
  const double lambda = trials.scaled_by(p);
  Philox g(78, stream_id(StreamTag::noise, 0, 0, 0, 3));
  const int reps = 4000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) sum += static_cast<double>(sample_binomial(trials, p, g));
  const double mean = sum / reps;
  CHECK(std::fabs(mean - lambda) <= 3.0 * std::sqrt(lambda / reps));
}

TEST_CASE("unrank/rank are inverse bijections", "[sampling]") {
  const BinomTable tab(30, 5);
  const int n = 12, r = 4;
  const std::uint64_t total = tab(n, r);
  REQUIRE(total == 495);
  std::set<std::vector<int>> seen;
  int idx[kMaxR];
  for (std::uint64_t rank = 0; rank < total; ++rank) {
    unrank_subset(rank, r, n, tab, idx);
    for (int a = 1; a < r; ++a) REQUIRE(idx[a - 1] < idx[a]);
    REQUIRE(idx[r - 1] < n);
    REQUIRE(rank_subset(idx, r, tab) == rank);
    seen.insert(std::vector<int>(idx, idx + r));
  }
  REQUIRE(seen.size() == total);
}

TEST_CASE("sample_tuples_without_replacement: exhaustive cases", "[sampling]") {
  const BinomTable tab(32, 5);
  Philox g(5, 6);
  {
    auto pool = pool_of(3);
    auto t = sample_tuples_without_replacement(pool, 3, 1, g, tab);
    REQUIRE(t == std::vector<std::uint32_t>{0, 1, 2});
  }
  {
    auto pool = pool_of(5, 100);
    auto t = sample_tuples_without_replacement(pool, 3, 10, g, tab);
    REQUIRE(t.size() == 30);
    std::set<std::vector<std::uint32_t>> subsets;
    for (int i = 0; i < 10; ++i)
      subsets.insert(std::vector<std::uint32_t>(t.begin() + 3 * i, t.begin() + 3 * i + 3));
    REQUIRE(subsets.size() == 10);  // all C(5,3) subsets exactly once
    for (const auto& s : subsets)
      for (auto x : s) REQUIRE((x >= 100 && x < 105));
  }
  {
    auto pool = pool_of(5);
    CHECK_THROWS_AS(sample_tuples_without_replacement(pool, 3, 11, g, tab), ConfigError);
  }
}

TEST_CASE("subset sampling is uniform over C(20,4)", "[sampling][slow]") {
  const BinomTable tab(20, 4);
  auto pool = pool_of(20);
  const double total = 4845.0;
  const int runs = 10000, t_per_run = 100;
  int idx[kMaxR] = {0, 1, 2, 3};
  const std::uint64_t target_rank = rank_subset(idx, 4, tab);
  int hits = 0;
  for (int run = 0; run < runs; ++run) {
    Philox g(500 + run, 1);
    auto tuples = sample_tuples_without_replacement(pool, 4, t_per_run, g, tab);
    for (int i = 0; i < t_per_run; ++i) {
      int sub[4] = {static_cast<int>(tuples[4 * i]), static_cast<int>(tuples[4 * i + 1]),
                    static_cast<int>(tuples[4 * i + 2]), static_cast<int>(tuples[4 * i + 3])};
      if (rank_subset(sub, 4, tab) == target_rank) ++hits;
    }
  }
  const double p = t_per_run / total;
  const double expect = runs * p;
  const double sd = std::sqrt(runs * p * (1.0 - p));
  CHECK(std::fabs(hits - expect) <= 3.0 * sd);
}

TEST_CASE("make_budget: paper scaling and clamps", "[sampling]") {
  BudgetSpec spec;  // c_n = 250, kappa = 1, c_n2 = 1e4, kappa2 = 0
  const Budget b = make_budget(1000, 2, 0.5, spec);
  CHECK(b.n_target == Catch::Approx(250.0 * 1000 * 256.0));
  CHECK(b.n2_target == Catch::Approx(1e4 * 256.0));
  CHECK(b.p == Catch::Approx(b.n_target / BigCount::binom(1000, 4).to_double()));
  CHECK(b.q == Catch::Approx(b.n2_target / BigCount::binom(999, 3).to_double()));
  CHECK_FALSE(b.p_clamped);
  CHECK_FALSE(b.q_clamped);

  // Tiny n: the default budget vastly exceeds C(n,r)/2, so p clamps to 1/2.
  const Budget small = make_budget(12, 1, 1.0, spec);
  CHECK(small.p == 0.5);
  CHECK(small.p_clamped);
  CHECK(small.q == 1.0);
  CHECK(small.q_clamped);

  BudgetSpec abs;
  abs.n_abs = 30;
  abs.n2_abs = 20;
  const Budget fixed = make_budget(12, 1, 1.0, abs);
  CHECK(fixed.p == Catch::Approx(30.0 / 220.0));
  CHECK(fixed.q == Catch::Approx(20.0 / 55.0));
}

TEST_CASE("draw_stratum_plan: degenerate probabilities", "[sampling]") {
  const BinomTable tab(12, 3);
  BudgetSpec spec;
  spec.n_abs = 30;
  spec.n2_abs = 20;
  Budget budget = make_budget(12, 1, 1.0, spec);
  auto pool = pool_of(6);

  {
    Budget z = budget;
    z.p = 0.0;
    Philox g(9, 1);
    auto plan = draw_stratum_plan(z, pool, 12, 3, g, tab);
    CHECK(plan.n_hat == 0);
    CHECK(plan.t1 == 0);
  }
  {
    Budget one = budget;
    one.p = 1.0;
    auto full = pool_of(12);
    Philox g(9, 2);
    auto plan = draw_stratum_plan(one, full, 12, 3, g, tab);
    CHECK(plan.n_hat == 220);
    CHECK(plan.t1 == 220);
    std::set<std::vector<std::uint32_t>> subsets;
    for (std::uint64_t i = 0; i < plan.t1; ++i)
      subsets.insert(std::vector<std::uint32_t>(plan.tuples.begin() + 3 * i,
                                                plan.tuples.begin() + 3 * i + 3));
    CHECK(subsets.size() == 220);
  }
}

TEST_CASE("draw_stratum_plan: expectations match exact combinatorics", "[sampling][slow]") {
  // n=12, r=3, |pool|=6, N=30: E[N-hat]=30, E[T1]=30*C(6,3)/C(12,3)
  const BinomTable tab(12, 3);
  BudgetSpec spec;
  spec.n_abs = 30;
  spec.n2_abs = 20;
  const Budget budget = make_budget(12, 1, 1.0, spec);
  auto pool = pool_of(6);
  const int reps = 20000;
  double sum_nhat = 0.0, sum_t1 = 0.0;
  for (int i = 0; i < reps; ++i) {
    Philox g(1000, stream_id(StreamTag::stat_plan, 0, 0, 0, i));
    auto plan = draw_stratum_plan(budget, pool, 12, 3, g, tab);
    sum_nhat += static_cast<double>(plan.n_hat);
    sum_t1 += static_cast<double>(plan.t1);
    std::set<std::vector<std::uint32_t>> subsets;
    for (std::uint64_t t = 0; t < plan.t1; ++t)
      subsets.insert(std::vector<std::uint32_t>(plan.tuples.begin() + 3 * t,
                                                plan.tuples.begin() + 3 * t + 3));
    REQUIRE(subsets.size() == plan.t1);  // distinct within a plan
  }
  const double p = budget.p;
  const double e_nhat = p * 220.0;
  const double sd_nhat = std::sqrt(220.0 * p * (1.0 - p) / reps);
  CHECK(std::fabs(sum_nhat / reps - e_nhat) <= 3.0 * sd_nhat);
  const double e_t1 = p * 20.0;  // 30 * C(6,3)/C(12,3) = 2.727...
  CHECK(e_t1 == Catch::Approx(30.0 * 20.0 / 220.0));
  const double sd_t1 = std::sqrt(20.0 * p * (1.0 - p) / reps);
  CHECK(std::fabs(sum_t1 / reps - e_t1) <= 3.0 * sd_t1);
}

TEST_CASE("draw_jackknife_plan: structure and expectations", "[sampling][slow]") {
  const BinomTable tab(12, 3);
  BudgetSpec spec;
  spec.n_abs = 30;
  spec.n2_abs = 20;
  const Budget budget = make_budget(12, 1, 1.0, spec);

  {
    Budget z = budget;
    z.q = 0.0;
    auto pool = pool_of(5);
    Philox g(4, 4);
    auto plan = draw_jackknife_plan(z, pool, 12, 3, g, tab);
    CHECK(plan.n_hat == 0);
    CHECK(plan.tuples.empty());
  }

  // n=12, r=3, |pool_minus_k|=5, N2=20: E[T1] = 20*C(5,2)/C(11,2) = 3.636...
  auto pool = pool_of(5);
  const int reps = 20000;
  double sum_t1 = 0.0, sum_nhat = 0.0;
  for (int i = 0; i < reps; ++i) {
    Philox g(2000, stream_id(StreamTag::jk_plan, 0, 0, 0, i));
    auto plan = draw_jackknife_plan(budget, pool, 12, 3, g, tab);
    REQUIRE(plan.arity == 2);
    sum_t1 += static_cast<double>(plan.t1);
    sum_nhat += static_cast<double>(plan.n_hat);
  }
  const double q = budget.q;
  const double e_t1 = q * 10.0;
  CHECK(e_t1 == Catch::Approx(20.0 * 10.0 / 55.0));
  const double sd_t1 = std::sqrt(10.0 * q * (1.0 - q) / reps);
  CHECK(std::fabs(sum_t1 / reps - e_t1) <= 3.0 * sd_t1);
  const double e_nhat = q * 55.0;
  const double sd_nhat = std::sqrt(55.0 * q * (1.0 - q) / reps);
  CHECK(std::fabs(sum_nhat / reps - e_nhat) <= 3.0 * sd_nhat);
}

TEST_CASE("plans: reproducibility and independence across streams", "[sampling][slow]") {
  const BinomTable tab(40, 4);
  BudgetSpec spec;
  spec.n_abs = 200;
  spec.n2_abs = 50;
  const Budget budget = make_budget(40, 2, 1.0, spec);
  auto pool = pool_of(25);

  // identical (seed, stream) => bit-identical plan
  Philox g1(42, stream_id(StreamTag::stat_plan, 1, 3));
  Philox g2(42, stream_id(StreamTag::stat_plan, 1, 3));
  auto a = draw_stratum_plan(budget, pool, 40, 4, g1, tab);
  auto b = draw_stratum_plan(budget, pool, 40, 4, g2, tab);
  CHECK(a.n_hat == b.n_hat);
  CHECK(a.tuples == b.tuples);

  // empirical correlation of N-hat across two strata is statistically zero
  const int reps = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < reps; ++i) {
    const std::uint64_t seed = mix_seed(7, i);
    Philox gm0(seed, stream_id(StreamTag::stat_plan, 0, 0));
    Philox gm1(seed, stream_id(StreamTag::stat_plan, 0, 1));
    const double x = static_cast<double>(draw_stratum_plan(budget, pool, 40, 4, gm0, tab).n_hat);
    const double y = static_cast<double>(draw_stratum_plan(budget, pool, 40, 4, gm1, tab).n_hat);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / reps - (sx / reps) * (sy / reps);
  const double vx = sxx / reps - (sx / reps) * (sx / reps);
  const double vy = syy / reps - (sy / reps) * (sy / reps);
  const double corr = cov / std::sqrt(vx * vy);
  CHECK(std::fabs(corr) <= 3.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("stream ids are structured and bounds-checked", "[sampling]") {
  CHECK(stream_id(StreamTag::stat_plan, 1, 2, 3, 4) !=
        stream_id(StreamTag::jk_plan, 1, 2, 3, 4));
  CHECK(stream_id(StreamTag::stat_plan, 0, 1) != stream_id(StreamTag::stat_plan, 1, 0));
  CHECK_THROWS_AS(stream_id(StreamTag::stat_plan, 64), std::invalid_argument);
  CHECK_THROWS_AS(stream_id(StreamTag::stat_plan, 0, 1 << 14), std::invalid_argument);
}
