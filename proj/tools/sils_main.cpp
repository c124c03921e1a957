// Command-line front end: run a single SILS concavity test on a CSV dataset,
// run Monte Carlo experiment sweeps, verify against the brute-force oracles,
// and regenerate fixtures.
//
// Exit codes: 0 ok, 1 configuration rejected, 2 data error, 3 verification failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sils/sils.hpp"
#include "sils/verify.hpp"

using nlohmann::json;
using namespace sils;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TestCli {
  std::string data_path;
  std::string config_path;
  std::string manifest_path;
  std::string json_path;
  std::string kernel;
  std::vector<double> bandwidths;
  std::vector<double> queries;
  double alpha = -1.0;
  std::int64_t bootstrap = -1;
  std::int64_t seed = -1;
  int workers = 0;
};

json result_to_json(const TestResult& res, const TestConfig& cfg, const std::string& data_ref) {
  json out;
  out["schema"] = kResultSchema;
  out["n"] = res.n;
  out["d"] = res.d;
  out["r"] = res.r;
  out["alpha"] = cfg.alpha;
  out["sup_stat"] = res.sup_stat;
  out["q_alpha"] = res.boot.q_alpha;
  out["p_value"] = res.boot.p_value;
  out["reject"] = res.reject;
  out["bandwidths"] = res.grid.bandwidths;
  out["alpha_n"] = res.alpha_n;
  json cells = json::array();
  const double sqrt_n = std::sqrt(static_cast<double>(res.n));
  for (int m = 0; m < res.grid.size(); ++m)
    for (int bi = 0; bi < static_cast<int>(res.grid.bandwidths.size()); ++bi) {
      const StatCell& c = res.stats.at(m, bi);
      json cell;
      cell["v"] = std::vector<double>(res.grid.query(m), res.grid.query(m) + res.d);
      cell["b"] = res.grid.bandwidths[bi];
      cell["u_prime"] = c.u_prime;
      cell["sqrt_n_u"] = sqrt_n * c.u_prime;
      cell["gamma_b"] = c.gamma_b;
      cell["n_hat"] = c.n_hat;
      cell["t1"] = c.t1;
      cell["pool"] = c.pool_size;
      cell["degenerate"] = c.degenerate_pool;
      cells.push_back(cell);
    }
  out["per_query"] = cells;
  out["warnings"] = res.diag.warnings;
  json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.seed;
  manifest["data"] = data_ref;
  manifest["config_text"] = serialize_test_config(cfg);
  manifest["kernel_evals"] = {{"statistic", res.diag.kernel_evals_stat},
                              {"jackknife", res.diag.kernel_evals_jackknife}};
  out["manifest"] = manifest;
  return out;
}

void print_human_table(const TestResult& res, const TestConfig& cfg, double seconds,
                       int workers) {
  std::printf("SILS concavity test  (n=%d, d=%d, r=%d, kernel=%s)\n", res.n, res.d, res.r,
              kernel_variant_name(cfg.variant));
  std::string bws;
  for (double b : res.grid.bandwidths) bws += std::to_string(b) + " ";
  std::printf("  %-28s %s\n", "bandwidths:", bws.c_str());
  std::printf("  %-28s %.6g\n", "sup sqrt(n) U':", res.sup_stat);
  std::printf("  %-28s %.6g   (level %.3g, B=%d)\n", "critical value q#:", res.boot.q_alpha,
              cfg.alpha, cfg.bootstrap_draws);
  std::printf("  %-28s %.6g\n", "p-value:", res.boot.p_value);
  std::printf("  %-28s %s\n", "reject H0 (concavity):", res.reject ? "YES" : "no");
  std::printf("  %-28s %llu statistic, %llu jackknife\n", "kernel evaluations:",
              static_cast<unsigned long long>(res.diag.kernel_evals_stat),
              static_cast<unsigned long long>(res.diag.kernel_evals_jackknife));
  std::printf("  %-28s %.2fs (%d workers)\n", "wall clock:", seconds, workers);
  for (const auto& w : res.diag.warnings) std::printf("  warning: %s\n", w.c_str());
  std::printf("  per-query table (sqrt_n_u | gamma_B | pool | t1):\n");
  const double sqrt_n = std::sqrt(static_cast<double>(res.n));
  for (int m = 0; m < res.grid.size(); ++m) {
    std::printf("    v=(");
    for (int c = 0; c < res.d; ++c)
      std::printf("%s%.3g", c ? "," : "", res.grid.query(m)[c]);
    std::printf(")");
    for (int bi = 0; bi < static_cast<int>(res.grid.bandwidths.size()); ++bi) {
      const StatCell& c = res.stats.at(m, bi);
      std::printf("  b=%.3g: %9.4f | %9.4f | %4u | %6llu", res.grid.bandwidths[bi],
                  sqrt_n * c.u_prime, c.gamma_b, c.pool_size,
                  static_cast<unsigned long long>(c.t1));
    }
    std::printf("\n");
  }
}

TestConfig build_test_config(const TestCli& args, std::string* data_path) {
  TestConfig cfg;
  if (!args.manifest_path.empty()) {
    std::ifstream in(args.manifest_path);
    if (!in) throw ConfigError("cannot open manifest '" + args.manifest_path + "'");
    json m = json::parse(in, nullptr, true, true);
    const json& manifest = m.contains("manifest") ? m["manifest"] : m;
    apply_test_config(parse_config_text(manifest.at("config_text").get<std::string>()), cfg);
    if (data_path->empty() && manifest.contains("data"))
      *data_path = manifest["data"].get<std::string>();
  }
  if (!args.config_path.empty())
    apply_test_config(parse_config_text(read_file(args.config_path)), cfg);
  if (!args.kernel.empty()) cfg.variant = parse_kernel_variant(args.kernel);
  if (!args.bandwidths.empty()) cfg.bandwidths = args.bandwidths;
  if (!args.queries.empty()) cfg.queries = args.queries;
  if (args.alpha >= 0) cfg.alpha = args.alpha;
  if (args.bootstrap >= 0) cfg.bootstrap_draws = static_cast<int>(args.bootstrap);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  cfg.workers = args.workers;
  return cfg;
}

int cmd_test(const TestCli& args) {
  std::string data_path = args.data_path;
  TestConfig cfg = build_test_config(args, &data_path);
  if (data_path.empty()) throw ConfigError("no dataset given (--data or manifest)");
  const Dataset ds = read_csv_file(data_path);
  const auto t0 = std::chrono::steady_clock::now();
  const TestResult res = run_test(ds, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_human_table(res, cfg, seconds, effective_workers(cfg.workers));
  if (!args.json_path.empty()) {
    std::ofstream out(args.json_path);
    if (!out) throw DataError("cannot write '" + args.json_path + "'");
    out << result_to_json(res, cfg, data_path).dump(2) << "\n";
  }
  return 0;
}

struct ExperimentCli {
  std::string config_path;
  std::string out_path;
  int reps = -1;
  int workers = 0;
};

int cmd_experiment(const ExperimentCli& args) {
  const ConfigMap map = parse_config_text(read_file(args.config_path));
  Scenario sc;
  apply_scenario(map, sc);
  TestConfig base;
  apply_test_config(map, base);
  base.workers = 1;

  int reps = args.reps > 0 ? args.reps : 1000;
  if (args.reps <= 0 && map.count("experiment.reps"))
    reps = static_cast<int>(std::stoll(map.at("experiment.reps")));

  std::vector<std::vector<double>> bandwidth_sets;
  if (map.count("experiment.bandwidth_sets")) {
    std::istringstream in(map.at("experiment.bandwidth_sets"));
    std::string part;
    while (std::getline(in, part, '|')) {
      std::istringstream pin(part);
      std::vector<double> set;
      double x;
      while (pin >> x) set.push_back(x);
      if (!set.empty()) bandwidth_sets.push_back(set);
    }
  }
  if (bandwidth_sets.empty()) bandwidth_sets.push_back(base.bandwidths);

  std::vector<double> levels = {base.alpha};
  if (map.count("experiment.levels")) {
    levels.clear();
    std::istringstream in(map.at("experiment.levels"));
    double x;
    while (in >> x) levels.push_back(x);
  }

  std::vector<KernelVariant> kernels = {base.variant};
  if (map.count("experiment.kernels")) {
    kernels.clear();
    std::istringstream in(map.at("experiment.kernels"));
    std::string s;
    while (in >> s) kernels.push_back(parse_kernel_variant(s));
  }

  std::ostringstream csv;
  csv << "scenario,kernel,bandwidths,level,rate,se,rejects,reps,assumption_violated,seconds\n";
  for (const auto& bwset : bandwidth_sets)
    for (KernelVariant kv : kernels)
      for (double level : levels) {
        TestConfig cfg = base;
        cfg.bandwidths = bwset;
        cfg.variant = kv;
        cfg.alpha = level;
        const RateResult rate = rejection_rate(sc, cfg, reps, args.workers);
        std::string bws;
        for (std::size_t i = 0; i < bwset.size(); ++i)
          bws += (i ? ";" : "") + std::to_string(bwset[i]);
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%s,%s,%g,%.6f,%.6f,%d,%d,%d,%.1f\n",
                      sc.id.c_str(), kernel_variant_name(kv), bws.c_str(), level, rate.rate,
                      rate.se, rate.rejects, rate.reps, rate.assumption_flag ? 1 : 0,
                      rate.seconds);
        csv << line;
        std::fputs(line, stdout);
        std::fflush(stdout);
      }
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) throw DataError("cannot write '" + args.out_path + "'");
    out << csv.str();
  }
  return 0;
}

int cmd_verify(const std::string& fixtures_dir) {
  const VerifyReport rep = run_verification(fixtures_dir);
  for (const auto& line : rep.lines)
    std::printf("[%s] %-45s %s\n", line.pass ? "PASS" : "FAIL", line.name.c_str(),
                line.detail.c_str());
  if (!rep.all_pass()) {
    std::printf("verification FAILED\n");
    return 3;
  }
  std::printf("verification passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stratified incomplete local simplex (SILS) concavity tests"};
  app.require_subcommand(1);

  TestCli test_args;
  auto* test = app.add_subcommand("test", "Run the test on a CSV dataset (v1,...,vd,y)");
  test->add_option("--data", test_args.data_path, "input CSV");
  test->add_option("--config", test_args.config_path, "config file (key = value sections)");
  test->add_option("--from-manifest", test_args.manifest_path,
                   "re-run from a result JSON's manifest");
  test->add_option("--json", test_args.json_path, "write result JSON here");
  test->add_option("--kernel", test_args.kernel, "identity | sign");
  test->add_option("--bandwidths", test_args.bandwidths, "bandwidth set")->delimiter(',');
  test->add_option("--queries", test_args.queries, "flat query coordinates")->delimiter(',');
  test->add_option("--alpha", test_args.alpha, "level in (0,1)");
  test->add_option("--bootstrap", test_args.bootstrap, "bootstrap draws B");
  test->add_option("--seed", test_args.seed, "root seed");
  test->add_option("--workers", test_args.workers, "worker threads (0 = hardware)");

  ExperimentCli exp_args;
  auto* exp = app.add_subcommand("experiment", "Monte Carlo rejection-rate sweeps");
  exp->add_option("--config", exp_args.config_path, "scenario + test config")->required();
  exp->add_option("--out", exp_args.out_path, "write rates CSV here");
  exp->add_option("--reps", exp_args.reps, "Monte Carlo replications");
  exp->add_option("--workers", exp_args.workers, "worker threads (0 = hardware)");

  std::string fixtures_dir;
  auto* verify = app.add_subcommand("verify", "Run oracle-equivalence and distribution checks");
  verify->add_option("--fixtures", fixtures_dir, "fixture directory to check against");

  std::string fixtures_out;
  auto* fixtures = app.add_subcommand("fixtures", "Regenerate oracle fixtures");
  fixtures->add_option("--out", fixtures_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (test->parsed()) return cmd_test(test_args);
    if (exp->parsed()) return cmd_experiment(exp_args);
    if (verify->parsed()) return cmd_verify(fixtures_dir);
    if (fixtures->parsed()) {
      write_fixtures(fixtures_out);
      std::printf("fixtures written to %s\n", fixtures_out.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
