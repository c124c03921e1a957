#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sils/errors.hpp"
#include "sils/localize.hpp"
#include "sils/sampling.hpp"

namespace sils {

// Everything a single test run needs besides the data.
struct TestConfig {
  KernelVariant variant = KernelVariant::identity;
  Kernel kernel;                            // uniform unless a user table is installed
  std::vector<double> bandwidths = {0.5};   // the finite bandwidth set
  std::vector<double> queries;              // flat M*d; empty -> default grid for d
  BudgetSpec budget;
  int bootstrap_draws = 1500;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware
};

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::string tmp = s;
  for (auto& ch : tmp)
    if (ch == ',' || ch == ';') ch = ' ';
  std::istringstream in(tmp);
  double x;
  while (in >> x) out.push_back(x);
  if (!in.eof()) throw ConfigError("config key '" + key + "': not a numeric list: " + s);
  return out;
}

inline double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + s);
  }
}

inline long long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + s);
  }
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: " + s);
  }
}

}  // namespace detail

// key = value lines with optional [section] headers; '#' starts a comment.
// Keys are flattened to "section.key".
inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[section.empty() ? key : section + "." + key] = val;
  }
  return out;
}

inline KernelVariant parse_kernel_variant(const std::string& s) {
  if (s == "identity" || s == "id") return KernelVariant::identity;
  if (s == "sign" || s == "sg") return KernelVariant::sign;
  throw ConfigError("unknown kernel variant '" + s + "' (expected identity or sign)");
}

inline const char* kernel_variant_name(KernelVariant v) {
  return v == KernelVariant::identity ? "identity" : "sign";
}

// Applies [test] and [budget] keys onto a TestConfig. Unknown keys in these
// sections are rejected; other sections are left to their own consumers.
inline void apply_test_config(const ConfigMap& map, TestConfig& cfg) {
  using detail::parse_double;
  using detail::parse_int;
  using detail::parse_list;
  using detail::parse_u64;
  for (const auto& [key, val] : map) {
    if (key == "test.kernel")
      cfg.variant = parse_kernel_variant(val);
    else if (key == "test.bandwidths")
      cfg.bandwidths = parse_list(val, key);
    else if (key == "test.queries")
      cfg.queries = parse_list(val, key);
    else if (key == "test.alpha")
      cfg.alpha = parse_double(val, key);
    else if (key == "test.seed")
      cfg.seed = parse_u64(val, key);
    else if (key == "test.bootstrap")
      cfg.bootstrap_draws = static_cast<int>(parse_int(val, key));
    else if (key == "test.workers")
      cfg.workers = static_cast<int>(parse_int(val, key));
    else if (key == "budget.c_n")
      cfg.budget.c_n = parse_double(val, key);
    else if (key == "budget.kappa")
      cfg.budget.kappa = parse_double(val, key);
    else if (key == "budget.c_n2")
      cfg.budget.c_n2 = parse_double(val, key);
    else if (key == "budget.kappa2")
      cfg.budget.kappa2 = parse_double(val, key);
    else if (key == "budget.n_abs")
      cfg.budget.n_abs = parse_double(val, key);
    else if (key == "budget.n2_abs")
      cfg.budget.n2_abs = parse_double(val, key);
    else if (key == "budget.p_override")
      cfg.budget.p_override = parse_double(val, key);
    else if (key == "budget.q_override")
      cfg.budget.q_override = parse_double(val, key);
    else if (key.rfind("test.", 0) == 0 || key.rfind("budget.", 0) == 0)
      throw ConfigError("unknown config key '" + key + "'");
  }
}

// Canonical echo of the effective configuration; parsing it back reproduces
// the run bit-exactly.
inline std::string serialize_test_config(const TestConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "[test]\n";
  out << "kernel = " << kernel_variant_name(cfg.variant) << "\n";
  out << "bandwidths =";
  for (double b : cfg.bandwidths) out << " " << b;
  out << "\n";
  if (!cfg.queries.empty()) {
    out << "queries =";
    for (double q : cfg.queries) out << " " << q;
    out << "\n";
  }
  out << "alpha = " << cfg.alpha << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "bootstrap = " << cfg.bootstrap_draws << "\n";
  out << "[budget]\n";
  out << "c_n = " << cfg.budget.c_n << "\n";
  out << "kappa = " << cfg.budget.kappa << "\n";
  out << "c_n2 = " << cfg.budget.c_n2 << "\n";
  out << "kappa2 = " << cfg.budget.kappa2 << "\n";
  if (cfg.budget.n_abs > 0) out << "n_abs = " << cfg.budget.n_abs << "\n";
  if (cfg.budget.n2_abs > 0) out << "n2_abs = " << cfg.budget.n2_abs << "\n";
  if (cfg.budget.p_override > 0) out << "p_override = " << cfg.budget.p_override << "\n";
  if (cfg.budget.q_override > 0) out << "q_override = " << cfg.budget.q_override << "\n";
  return out.str();
}

}  // namespace sils
