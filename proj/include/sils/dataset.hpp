#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sils/errors.hpp"

namespace sils {

// n observations (V_i in R^d, Y_i in R), row-major covariates.
struct Dataset {
  int d = 0;
  std::vector<double> v;  // n * d
  std::vector<double> y;

  int n() const { return static_cast<int>(y.size()); }
  const double* point(int i) const { return v.data() + static_cast<std::size_t>(i) * d; }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    std::size_t a = f.find_first_not_of(" \t");
    std::size_t b = f.find_last_not_of(" \t");
    f = (a == std::string::npos) ? std::string() : f.substr(a, b - a + 1);
  }
  return out;
}

inline double parse_number(const std::string& s, int line_no, const std::string& col) {
  double val = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), val);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("line " + std::to_string(line_no) + ", column '" + col +
                    "': not a number: '" + s + "'");
  if (!std::isfinite(val))
    throw DataError("line " + std::to_string(line_no) + ", column '" + col +
                    "': non-finite value");
  return val;
}

}  // namespace detail

// CSV schema: header v1,...,vd,y; '.' decimal; finite numeric entries.
inline Dataset read_csv(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw DataError(name + ": empty file");
  auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.back() != "y")
    throw DataError(name + ": header must be v1,...,vd,y (missing column 'y')");
  const int d = static_cast<int>(header.size()) - 1;
  for (int c = 0; c < d; ++c) {
    const std::string want = "v" + std::to_string(c + 1);
    if (header[c] != want)
      throw DataError(name + ": header column " + std::to_string(c + 1) + " is '" +
                      header[c] + "', expected '" + want + "'");
  }
  Dataset ds;
  ds.d = d;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != d + 1)
      throw DataError(name + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(d + 1) + " fields, got " +
                      std::to_string(fields.size()));
    for (int c = 0; c < d; ++c)
      ds.v.push_back(detail::parse_number(fields[c], line_no, header[c]));
    ds.y.push_back(detail::parse_number(fields[d], line_no, "y"));
  }
  return ds;
}

inline Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, path);
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  for (int c = 0; c < ds.d; ++c) out << "v" << (c + 1) << ",";
  out << "y\n";
  char buf[64];
  for (int i = 0; i < ds.n(); ++i) {
    for (int c = 0; c < ds.d; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.point(i)[c]);
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", ds.y[i]);
    out << buf << "\n";
  }
}

}  // namespace sils
