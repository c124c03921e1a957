#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sils/bigcount.hpp"
#include "sils/errors.hpp"
#include "sils/rng.hpp"
#include "sils/statistic.hpp"

namespace sils {

// Brute-force references for small instances. These are the independent
// oracles the incomplete machinery is checked against; they never touch the
// sampling path.
struct OracleLimits {
  int max_n = 20;
  int max_d = 2;
  double max_enum = 1e6;  // cap on C(n, r)
};

namespace detail {

inline void check_oracle_limits(int n, int d, int r, const OracleLimits& lim) {
  if (n > lim.max_n || d > lim.max_d)
    throw ConfigError("oracle limit exceeded: n=" + std::to_string(n) +
                      ", d=" + std::to_string(d));
  if (BigCount::binom(n, r).to_double() > lim.max_enum)
    throw ConfigError("oracle limit exceeded: C(n,r) too large to enumerate");
}

// Lexicographic enumeration of ascending k-subsets of [0, n).
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx.data());
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// Complete local U-statistic: the exact average of h_v over all C(n,r) tuples.
inline double complete_u(const Dataset& ds, const double* v, double b, KernelVariant variant,
                         const Kernel& kernel, const OracleLimits& lim = {}) {
  const int n = ds.n();
  const int r = ds.d + 2;
  detail::check_oracle_limits(n, ds.d, r, lim);
  const LocalEvaluator ev(ds, kernel, variant, v, b);
  KahanSum s;
  std::uint64_t count = 0;
  std::uint32_t tuple[kMaxR];
  detail::for_each_subset(n, r, [&](const int* idx) {
    for (int a = 0; a < r; ++a) tuple[a] = static_cast<std::uint32_t>(idx[a]);
    s.add(ev.h_tuple(tuple, r));
    ++count;
  });
  return count == 0 ? 0.0 : s.value() / static_cast<double>(count);
}

// Complete analogue of the jackknife estimator: exact average of
// h_v(X_{ {k} u iota }) over all (r-1)-subsets of [n] \ {k}.
inline double complete_projection(const Dataset& ds, int k, const double* v, double b,
                                  KernelVariant variant, const Kernel& kernel,
                                  const OracleLimits& lim = {}) {
  const int n = ds.n();
  const int r = ds.d + 2;
  detail::check_oracle_limits(n, ds.d, r, lim);
  const LocalEvaluator ev(ds, kernel, variant, v, b);
  KahanSum s;
  std::uint64_t count = 0;
  std::uint32_t tuple[kMaxR];
  detail::for_each_subset(n - 1, r - 1, [&](const int* idx) {
    for (int a = 0; a < r - 1; ++a) {
      const int i = idx[a];
      tuple[a] = static_cast<std::uint32_t>(i >= k ? i + 1 : i);  // skip k
    }
    s.add(ev.h_tuple(tuple, r - 1, k));
    ++count;
  });
  return count == 0 ? 0.0 : s.value() / static_cast<double>(count);
}

struct MeanWEstimate {
  double mean = 0.0;
  double se = 0.0;
  int reps = 0;
};

// Monte Carlo estimate of E[w(X_1,...,X_r)] under Y = f(V) + eps with V
// uniform on (0,1)^d. Used for least-favorable-configuration checks.
inline MeanWEstimate mean_w_under_model(const std::function<double(const double*, int)>& f,
                                        const std::function<double(Philox&)>& noise, int d,
                                        int mc_reps, std::uint64_t seed) {
  const int r = d + 2;
  Philox g(seed, stream_id(StreamTag::noise, 0, 0, 0, 0));
  double pts[kMaxR * kMaxDim];
  double ys[kMaxR];
  KahanSum s, s2;
  for (int rep = 0; rep < mc_reps; ++rep) {
    for (int i = 0; i < r; ++i) {
      for (int c = 0; c < d; ++c) pts[i * d + c] = uniform01(g);
      ys[i] = f(pts + i * d, d) + noise(g);
    }
    const double w = w_identity(pts, ys, d);
    s.add(w);
    s2.add(w * w);
  }
  MeanWEstimate out;
  out.reps = mc_reps;
  out.mean = s.value() / mc_reps;
  const double var = std::fmax(0.0, s2.value() / mc_reps - out.mean * out.mean);
  out.se = std::sqrt(var / mc_reps);
  return out;
}

}  // namespace sils
