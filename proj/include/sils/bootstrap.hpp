#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sils/jackknife.hpp"

namespace sils {

struct BootstrapRun {
  std::vector<double> draws;  // realizations of the bootstrap supremum
  double q_alpha = 0.0;
  double p_value = 1.0;
};

// One bootstrap replication: sup over (v, b) of
//   r * n^{-1/2} sum_k xi_k (G^(k)(h_v) - Gbar(h_v))
//     + (n/N_b)^{1/2} * xi^{(m,b)} * sqrt(gamma_B(h_v)).
// The per-observation multipliers xi_k are one stream per draw, shared across
// every query and bandwidth; each (stratum, bandwidth) has its own one-Gaussian
// stream. With one query per stratum the B-parts are conditionally independent
// Gaussians with variance gamma_B, which is exactly this short form.
inline double bootstrap_draw(const JackknifeTable& jk, const StatTable& stats,
                             const std::vector<double>& alpha_n, int r, std::uint64_t seed,
                             int t, std::vector<double>& xi_scratch) {
  const int n = jk.n;
  xi_scratch.resize(n);
  Philox gd(seed, stream_id(StreamTag::boot_data, 0, 0, 0, static_cast<std::uint64_t>(t)));
  std::normal_distribution<double> normal;
  double xi_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    xi_scratch[k] = normal(gd);
    xi_sum += xi_scratch[k];
  }
  const double rn = static_cast<double>(r) / std::sqrt(static_cast<double>(n));
  double best = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < jk.M; ++m)
    for (int bi = 0; bi < jk.nb; ++bi) {
      const double* col = jk.column(m, bi);
      double dot = 0.0;
      for (int k = 0; k < n; ++k) dot += xi_scratch[k] * col[k];
      const double a_part = rn * (dot - jk.g_bar[static_cast<std::size_t>(m) * jk.nb + bi] * xi_sum);
      Philox gs(seed, stream_id(StreamTag::boot_stratum, bi, m, 0, static_cast<std::uint64_t>(t)));
      std::normal_distribution<double> normal_s;
      const double xi_mb = normal_s(gs);
      const double b_part =
          std::sqrt(alpha_n[bi]) * xi_mb * std::sqrt(stats.at(m, bi).gamma_b);
      best = std::fmax(best, a_part + b_part);
    }
  return best;
}

// ceil((1-alpha)(B+1))-th order statistic, capped at index B.
inline double critical_value(const std::vector<double>& draws, double alpha) {
  if (draws.empty()) throw ConfigError("critical_value: no bootstrap draws");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw ConfigError("critical_value: alpha must lie in (0,1)");
  const std::size_t b = draws.size();
  std::vector<double> sorted(draws);
  std::sort(sorted.begin(), sorted.end());
  std::size_t idx = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * (static_cast<double>(b) + 1.0)));
  if (idx < 1) idx = 1;
  if (idx > b) idx = b;
  return sorted[idx - 1];
}

// Add-one inversion; values live in {1/(B+1), ..., 1}.
inline double bootstrap_p_value(const std::vector<double>& draws, double observed) {
  std::size_t count = 0;
  for (double d : draws)
    if (d >= observed) ++count;
  return static_cast<double>(1 + count) / static_cast<double>(draws.size() + 1);
}

inline BootstrapRun run_bootstrap(const JackknifeTable& jk, const StatTable& stats,
                                  const std::vector<double>& alpha_n, int r,
                                  const TestConfig& cfg, double observed_sup) {
  if (cfg.bootstrap_draws < 1) throw ConfigError("bootstrap draw count must be >= 1");
  BootstrapRun run;
  run.draws.resize(cfg.bootstrap_draws);
  parallel_for(cfg.bootstrap_draws, cfg.workers, [&](std::int64_t t) {
    thread_local std::vector<double> xi;
    run.draws[t] = bootstrap_draw(jk, stats, alpha_n, r, cfg.seed, static_cast<int>(t), xi);
  });
  run.q_alpha = critical_value(run.draws, cfg.alpha);
  run.p_value = bootstrap_p_value(run.draws, observed_sup);
  return run;
}

}  // namespace sils
