#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sils/run.hpp"

namespace sils {

// Regression functions used in the experiments.
struct RegressionFn {
  enum class Type {
    affine_poly,          // sum_j v_j^kappa0 (affine at kappa0 = 1)
    locally_convex,       // c1 phi((v-mu1)/w1) - c2 phi((v-mu2)/w2), phi = exp(-|v|^2/2)
    piecewise_affine_abs, // -sum_j |v_j - knot|
    max_affine,           // max(theta1'v + off1, theta2'v + off2)
  };

  Type type = Type::affine_poly;
  double kappa0 = 1.0;
  double c1 = 1.0, c2 = 0.3, omega1 = 1.5, omega2 = 0.15;
  std::vector<double> mu1, mu2;  // default (0.75,...) and (0.25,...)
  double knot = 0.8;
  std::vector<double> theta1, theta2;
  double off1 = 0.0, off2 = 0.0;

  double operator()(const double* v, int d) const {
    switch (type) {
      case Type::affine_poly: {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += std::pow(v[c], kappa0);
        return s;
      }
      case Type::locally_convex: {
        double q1 = 0.0, q2 = 0.0;
        for (int c = 0; c < d; ++c) {
          const double m1 = mu1.empty() ? 0.75 : mu1[c];
          const double m2 = mu2.empty() ? 0.25 : mu2[c];
          const double z1 = (v[c] - m1) / omega1;
          const double z2 = (v[c] - m2) / omega2;
          q1 += z1 * z1;
          q2 += z2 * z2;
        }
        return c1 * std::exp(-0.5 * q1) - c2 * std::exp(-0.5 * q2);
      }
      case Type::piecewise_affine_abs: {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s -= std::fabs(v[c] - knot);
        return s;
      }
      case Type::max_affine: {
        double f1 = off1, f2 = off2;
        for (int c = 0; c < d; ++c) {
          f1 += (c < static_cast<int>(theta1.size()) ? theta1[c] : 0.0) * v[c];
          f2 += (c < static_cast<int>(theta2.size()) ? theta2[c] : 0.0) * v[c];
        }
        return std::fmax(f1, f2);
      }
    }
    return 0.0;
  }
};

// Noise laws from the experiments; the mixture parameters are variances by
// default (mixture_param_is_sd flips the reading).
struct NoiseLaw {
  enum class Type { gaussian, gaussian_mixture, student_t };

  Type type = Type::gaussian;
  double sigma = 0.2;
  double mix_p = 0.5;
  double mix_mu_a = -0.1, mix_par_a = 0.06;
  double mix_mu_b = 0.1, mix_par_b = 0.24;
  bool mixture_param_is_sd = false;
  double t_scale = 0.2 / std::sqrt(3.0);
  double t_df = 3.0;

  void validate() const {
    if (type == Type::gaussian && !(sigma >= 0.0))
      throw ConfigError("gaussian noise requires sigma >= 0");
    if (type == Type::student_t && (!(t_df > 0.0) || !(t_scale > 0.0)))
      throw ConfigError("student_t noise requires df > 0 and scale > 0");
    if (type == Type::gaussian_mixture) {
      if (!(mix_p >= 0.0) || !(mix_p <= 1.0))
        throw ConfigError("mixture weight must lie in [0,1]");
      if (!(mix_par_a > 0.0) || !(mix_par_b > 0.0))
        throw ConfigError("mixture spread parameters must be positive");
    }
  }

  // Symmetric about zero? Gaussians and scaled t are; a mixture only when it
  // mirrors exactly.
  bool symmetric() const {
    if (type != Type::gaussian_mixture) return true;
    return mix_p == 0.5 && mix_mu_a == -mix_mu_b && mix_par_a == mix_par_b;
  }

  double sample(Philox& g) const {
    std::normal_distribution<double> normal;
    switch (type) {
      case Type::gaussian:
        return sigma == 0.0 ? 0.0 : sigma * normal(g);
      case Type::gaussian_mixture: {
        const bool first = uniform01(g) < mix_p;
        const double mu = first ? mix_mu_a : mix_mu_b;
        const double par = first ? mix_par_a : mix_par_b;
        const double sd = mixture_param_is_sd ? par : std::sqrt(par);
        return mu + sd * normal(g);
      }
      case Type::student_t: {
        std::student_t_distribution<double> t(t_df);
        return t_scale * t(g);
      }
    }
    return 0.0;
  }
};

// One simulation design: covariates uniform on (0,1)^d, Y = f(V) + eps.
struct Scenario {
  std::string id = "scenario";
  int d = 2;
  int n = 500;
  RegressionFn f;
  NoiseLaw noise;
  std::uint64_t seed = 1;
};

// (seed, replication id) fully determines the dataset.
inline Dataset generate(const Scenario& sc, std::uint32_t rep) {
  sc.noise.validate();
  if (sc.d < 1 || sc.d > kMaxDim) throw ConfigError("scenario dimension out of range");
  if (sc.n < 1) throw ConfigError("scenario sample size must be positive");
  Dataset ds;
  ds.d = sc.d;
  ds.v.resize(static_cast<std::size_t>(sc.n) * sc.d);
  ds.y.resize(sc.n);
  Philox g(sc.seed, stream_id(StreamTag::dataset, 0, 0, 0, rep));
  for (int i = 0; i < sc.n; ++i) {
    double* p = ds.v.data() + static_cast<std::size_t>(i) * sc.d;
    for (int c = 0; c < sc.d; ++c) p[c] = uniform01(g);
    ds.y[i] = sc.f(p, sc.d) + sc.noise.sample(g);
  }
  return ds;
}

inline RegressionFn::Type parse_regression_type(const std::string& s) {
  if (s == "affine_poly" || s == "poly") return RegressionFn::Type::affine_poly;
  if (s == "locally_convex") return RegressionFn::Type::locally_convex;
  if (s == "piecewise_affine_abs") return RegressionFn::Type::piecewise_affine_abs;
  if (s == "max_affine") return RegressionFn::Type::max_affine;
  throw ConfigError("unknown regression function '" + s + "'");
}

inline const char* regression_type_name(RegressionFn::Type t) {
  switch (t) {
    case RegressionFn::Type::affine_poly: return "affine_poly";
    case RegressionFn::Type::locally_convex: return "locally_convex";
    case RegressionFn::Type::piecewise_affine_abs: return "piecewise_affine_abs";
    case RegressionFn::Type::max_affine: return "max_affine";
  }
  return "?";
}

inline NoiseLaw::Type parse_noise_type(const std::string& s) {
  if (s == "gaussian") return NoiseLaw::Type::gaussian;
  if (s == "mixture" || s == "gaussian_mixture") return NoiseLaw::Type::gaussian_mixture;
  if (s == "student_t") return NoiseLaw::Type::student_t;
  throw ConfigError("unknown noise law '" + s + "'");
}

inline const char* noise_type_name(NoiseLaw::Type t) {
  switch (t) {
    case NoiseLaw::Type::gaussian: return "gaussian";
    case NoiseLaw::Type::gaussian_mixture: return "mixture";
    case NoiseLaw::Type::student_t: return "student_t";
  }
  return "?";
}

// [scenario] section of the config file.
inline void apply_scenario(const ConfigMap& map, Scenario& sc) {
  using detail::parse_double;
  using detail::parse_int;
  using detail::parse_list;
  using detail::parse_u64;
  for (const auto& [key, val] : map) {
    if (key == "scenario.id")
      sc.id = val;
    else if (key == "scenario.d")
      sc.d = static_cast<int>(parse_int(val, key));
    else if (key == "scenario.n")
      sc.n = static_cast<int>(parse_int(val, key));
    else if (key == "scenario.seed")
      sc.seed = parse_u64(val, key);
    else if (key == "scenario.f")
      sc.f.type = parse_regression_type(val);
    else if (key == "scenario.kappa0")
      sc.f.kappa0 = parse_double(val, key);
    else if (key == "scenario.c1")
      sc.f.c1 = parse_double(val, key);
    else if (key == "scenario.c2")
      sc.f.c2 = parse_double(val, key);
    else if (key == "scenario.omega1")
      sc.f.omega1 = parse_double(val, key);
    else if (key == "scenario.omega2")
      sc.f.omega2 = parse_double(val, key);
    else if (key == "scenario.mu1")
      sc.f.mu1 = parse_list(val, key);
    else if (key == "scenario.mu2")
      sc.f.mu2 = parse_list(val, key);
    else if (key == "scenario.knot")
      sc.f.knot = parse_double(val, key);
    else if (key == "scenario.theta1")
      sc.f.theta1 = parse_list(val, key);
    else if (key == "scenario.theta2")
      sc.f.theta2 = parse_list(val, key);
    else if (key == "scenario.off1")
      sc.f.off1 = parse_double(val, key);
    else if (key == "scenario.off2")
      sc.f.off2 = parse_double(val, key);
    else if (key == "scenario.noise")
      sc.noise.type = parse_noise_type(val);
    else if (key == "scenario.sigma")
      sc.noise.sigma = parse_double(val, key);
    else if (key == "scenario.mix_p")
      sc.noise.mix_p = parse_double(val, key);
    else if (key == "scenario.mix_mu_a")
      sc.noise.mix_mu_a = parse_double(val, key);
    else if (key == "scenario.mix_par_a")
      sc.noise.mix_par_a = parse_double(val, key);
    else if (key == "scenario.mix_mu_b")
      sc.noise.mix_mu_b = parse_double(val, key);
    else if (key == "scenario.mix_par_b")
      sc.noise.mix_par_b = parse_double(val, key);
    else if (key == "scenario.mixture_param_is_sd")
      sc.noise.mixture_param_is_sd = (val == "true" || val == "1");
    else if (key == "scenario.t_scale")
      sc.noise.t_scale = parse_double(val, key);
    else if (key == "scenario.t_df")
      sc.noise.t_df = parse_double(val, key);
    else if (key.rfind("scenario.", 0) == 0)
      throw ConfigError("unknown config key '" + key + "'");
  }
  sc.noise.validate();
}

struct RateResult {
  int reps = 0;
  int rejects = 0;
  double rate = 0.0;
  double se = 0.0;  // sqrt(rate (1-rate) / reps); 0 by convention at the edges
  bool assumption_flag = false;  // sign kernel under asymmetric noise
  double seconds = 0.0;
};

// Monte Carlo rejection probability: mc_reps independent datasets, one test
// each. Replications are the parallel unit; each gets its own derived seed so
// the result is worker-count invariant.
inline RateResult rejection_rate(const Scenario& sc, const TestConfig& cfg, int mc_reps,
                                 int workers = 0) {
  if (mc_reps < 1) throw ConfigError("mc_reps must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::uint8_t> rejected(mc_reps, 0);
  parallel_for(mc_reps, workers, [&](std::int64_t rep) {
    const Dataset ds = generate(sc, static_cast<std::uint32_t>(rep));
    TestConfig rep_cfg = cfg;
    rep_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    rep_cfg.workers = 1;
    const TestResult res = run_test(ds, rep_cfg);
    rejected[rep] = res.reject ? 1 : 0;
  });
  RateResult out;
  out.reps = mc_reps;
  for (std::uint8_t r : rejected) out.rejects += r;
  out.rate = static_cast<double>(out.rejects) / mc_reps;
  out.se = std::sqrt(out.rate * (1.0 - out.rate) / mc_reps);
  out.assumption_flag = cfg.variant == KernelVariant::sign && !sc.noise.symmetric();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace sils
